#include "fgw/parallel.hpp"

#include <cstdlib>
#include <string>

namespace fgw {

namespace {
std::atomic<int> override_threads{0};
}

int thread_count()
{
    if (int n = override_threads.load(); n > 0)
        return n;
    if (const char* env = std::getenv("FGW_THREADS")) {
        try {
            int n = std::stoi(env);
            if (n > 0)
                return n;
        } catch (const std::exception&) {
        }
    }
    return 1;
}

void set_thread_count(int n) { override_threads = n > 0 ? n : 0; }

} // namespace fgw
