#include "ssgl_gam/parallel.hpp"

#include <cstdlib>
#include <string>

namespace ssgl_gam {

int default_jobs() {
    if (const char* env = std::getenv("SSGL_GAM_JOBS")) {
        try {
            const int v = std::stoi(env);
            if (v >= 1) return v;
        } catch (...) {
        }
    }
    return 1;
}

}  // namespace ssgl_gam
