#include "whitneydim/error.hpp"

namespace whitneydim {

const char* to_string(ErrorKind kind) noexcept {
    switch (kind) {
        case ErrorKind::config: return "config error";
        case ErrorKind::resource: return "resource limit";
        case ErrorKind::format: return "format error";
        case ErrorKind::io: return "io error";
        case ErrorKind::empty_set: return "empty set";
        case ErrorKind::invalid_params: return "invalid parameters";
        case ErrorKind::insufficient_data: return "insufficient data";
        case ErrorKind::scale_too_fine: return "scale too fine";
        case ErrorKind::no_overlap: return "no overlap";
        case ErrorKind::center_not_in_set: return "center not in set";
        case ErrorKind::overflow: return "arithmetic overflow";
    }
    return "error";
}

int exit_code_for(ErrorKind kind) noexcept {
    switch (kind) {
        case ErrorKind::resource:
        case ErrorKind::overflow:
            return 3;
        case ErrorKind::insufficient_data:
        case ErrorKind::no_overlap:
        case ErrorKind::scale_too_fine:
            return 1;
        default:
            return 2;
    }
}

}  // namespace whitneydim
