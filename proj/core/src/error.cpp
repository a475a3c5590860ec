#include "msdc/error.hpp"

namespace msdc {

int exit_code_for(ErrorKind kind) noexcept
{
    switch (kind) {
    case ErrorKind::config:
        return 2;
    case ErrorKind::dimension:
    case ErrorKind::integrity:
    case ErrorKind::io:
        return 3;
    case ErrorKind::calibration:
    case ErrorKind::numerical:
        return 4;
    }
    return 1;
}

}  // namespace msdc
