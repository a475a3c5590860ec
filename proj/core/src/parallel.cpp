#include "msdc/parallel.hpp"

#include <algorithm>
#include <cstdlib>
#include <string>
#include <thread>

namespace msdc {

int worker_threads()
{
    const int hw = std::max(1, int(std::thread::hardware_concurrency()));
    if (const char* env = std::getenv("MSDC_THREADS")) {
        try {
            const int n = std::stoi(env);
            if (n >= 1)
                return n;
        } catch (const std::exception&) {
        }
    }
    return hw;
}

}  // namespace msdc
