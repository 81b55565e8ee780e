#include "concfn/bound_report.hpp"

#include <cmath>
#include <cstdio>
#include <limits>
#include <stdexcept>

namespace concfn {

std::string inequality_id_name(InequalityId id) {
    switch (id) {
        case InequalityId::lemma1: return "lemma1";
        case InequalityId::eq11366: return "eq11366";
        case InequalityId::thm1: return "thm1";
        case InequalityId::thm2: return "thm2";
        case InequalityId::thm3: return "thm3";
        case InequalityId::thm4: return "thm4";
        case InequalityId::eq12sp: return "eq12sp";
        case InequalityId::window_regularity: return "window_regularity";
        case InequalityId::product_bound: return "product_bound";
    }
    throw std::logic_error("unknown inequality id");
}

InequalityId inequality_id_from_name(const std::string& name) {
    for (int i = 0; i <= static_cast<int>(InequalityId::product_bound); ++i) {
        auto id = static_cast<InequalityId>(i);
        if (inequality_id_name(id) == name) return id;
    }
    throw std::invalid_argument("unknown inequality id: " + name);
}

bool BoundReport::vacuous() const {
    for (const auto& f : flags)
        if (f.rfind("vacuous", 0) == 0) return true;
    return false;
}

void BoundReport::set_sides(double lhs_value, double rhs_value) {
    lhs = lhs_value;
    rhs_unconstanted = rhs_value;
    implied_constant = rhs_value > 0.0 ? lhs_value / rhs_value
                                       : std::numeric_limits<double>::infinity();
}

std::string format_double(double v) {
    char buf[64];
    std::snprintf(buf, sizeof(buf), "%.17g", v);
    return buf;
}

}  // namespace concfn
