#include "superosc/parallel.hpp"

#include <cstdlib>
#include <string>

#include <omp.h>

#include "superosc/errors.hpp"

namespace superosc {

int configure_threads_from_env() {
    if (const char* env = std::getenv(kThreadsEnv); env != nullptr && *env != '\0') {
        int n = 0;
        try {
            n = std::stoi(env);
        } catch (const std::exception&) {
            throw ArgumentError(std::string(kThreadsEnv) + " must be a positive integer, got '" + env + "'");
        }
        if (n < 1) throw ArgumentError(std::string(kThreadsEnv) + " must be a positive integer");
        omp_set_num_threads(n);
    }
    return omp_get_max_threads();
}

int max_threads() { return omp_get_max_threads(); }

}  // namespace superosc
