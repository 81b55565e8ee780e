#pragma once

#include <map>
#include <string>
#include <vector>

namespace concfn {

// Every inequality this library checks carries an unspecified absolute
// constant, so checks never assert "lhs <= rhs"; they record the
// constant-free right-hand side and the implied constant lhs/rhs instead.
enum class InequalityId {
    lemma1,
    eq11366,
    thm1,
    thm2,
    thm3,
    thm4,
    eq12sp,
    window_regularity,  // self-test: Q(F, m*lambda) <= m * Q(F, lambda)
    product_bound,      // independent-coordinate product bound
};

std::string inequality_id_name(InequalityId id);
InequalityId inequality_id_from_name(const std::string& name);

struct BoundReport {
    InequalityId id = InequalityId::lemma1;
    double lhs = 0.0;
    double rhs_unconstanted = 0.0;
    double implied_constant = 0.0;  // lhs / rhs_unconstanted
    // Parameter echo, sufficient to re-run the check in isolation. Values
    // are preformatted strings (rationals as "p/q", floats with 17 digits).
    std::map<std::string, std::string> params;
    std::vector<std::string> flags;  // e.g. "vacuous:beta_zero"

    bool vacuous() const;
    void set_sides(double lhs_value, double rhs_value);
};

std::string format_double(double v);  // 17 significant digits

}  // namespace concfn
