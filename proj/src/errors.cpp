#include "nldiff/errors.hpp"

#include <cstdlib>
#include <string>

#include "nldiff/parallel.hpp"

namespace nldiff {

const char* to_string(ErrorKind kind) {
    switch (kind) {
        case ErrorKind::InvalidParams: return "InvalidParams";
        case ErrorKind::NonConvergence: return "NonConvergence";
        case ErrorKind::QuadratureFailure: return "QuadratureFailure";
        case ErrorKind::GridTooCoarse: return "GridTooCoarse";
        case ErrorKind::UnknownProfile: return "UnknownProfile";
        case ErrorKind::InsufficientData: return "InsufficientData";
        case ErrorKind::FitUnstable: return "FitUnstable";
        case ErrorKind::ConfigError: return "ConfigError";
    }
    return "Unknown";
}

unsigned resolve_threads(unsigned requested) {
    if (requested > 0) return requested;
    if (const char* env = std::getenv("NLDIFF_THREADS")) {
        try {
            const long v = std::stol(env);
            if (v > 0) return static_cast<unsigned>(v);
        } catch (const std::exception&) {
        }
    }
    return 1;
}

}  // namespace nldiff
