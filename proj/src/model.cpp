#include "pvrec/model.hpp"

namespace pvrec {

std::optional<Minutes> next_occurrence(const Event& e, Minutes t) {
    return next_start(e.timing, e.periodicity, t);
}

}  // namespace pvrec
