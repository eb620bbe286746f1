/**
 * Sparse multivariate polynomials with complex coefficients.
 */
#pragma once

#include <algorithm>
#include <cstddef>
#include <iomanip>
#include <limits>
#include <sstream>
#include <string>
#include <vector>

#include <Eigen/Dense>

#include "kbkk/common.hpp"

namespace kbkk {

using Exponent = std::vector<int>;
using CVector = Eigen::VectorXcd;
using CMatrix = Eigen::MatrixXcd;

struct Term {
    Exponent exponents;
    Complex coefficient;

    int degree() const {
        int d = 0;
        for (int e : exponents) d += e;
        return d;
    }
};

class Polynomial {
  public:
    explicit Polynomial(std::size_t num_vars = 0) : num_vars_(num_vars) {}

    std::size_t num_vars() const noexcept { return num_vars_; }
    const std::vector<Term>& terms() const noexcept { return terms_; }
    bool empty() const noexcept { return terms_.empty(); }

    /// Adds c * x^a, merging with an existing term of the same exponent.
    /// Terms whose coefficient becomes exactly zero are removed.
    Polynomial& add(const Exponent& a, Complex c) {
        if (a.size() != num_vars_) throw std::invalid_argument("exponent length does not match num_vars");
        for (int e : a)
            if (e < 0) throw std::invalid_argument("negative exponent");
        auto it = std::find_if(terms_.begin(), terms_.end(), [&](const Term& t) { return t.exponents == a; });
        if (it != terms_.end()) {
            it->coefficient += c;
            if (it->coefficient == Complex{}) terms_.erase(it);
        } else if (c != Complex{}) {
            terms_.push_back({a, c});
        }
        return *this;
    }

    int degree() const {
        int d = 0;
        for (const auto& t : terms_) d = std::max(d, t.degree());
        return d;
    }

    Complex coefficient_of(const Exponent& a) const {
        for (const auto& t : terms_)
            if (t.exponents == a) return t.coefficient;
        return {};
    }

    Complex evaluate(const CVector& x) const {
        Complex sum{};
        for (const auto& t : terms_) sum += t.coefficient * monomial(t.exponents, x);
        return sum;
    }

    /// Partial derivative with respect to variable k, evaluated at x.
    Complex derivative(std::size_t k, const CVector& x) const {
        Complex sum{};
        for (const auto& t : terms_) {
            const int e = t.exponents[k];
            if (e == 0) continue;
            Complex m = t.coefficient * static_cast<double>(e);
            for (std::size_t v = 0; v < num_vars_; ++v) {
                const int p = v == k ? e - 1 : t.exponents[v];
                for (int r = 0; r < p; ++r) m *= x[static_cast<Eigen::Index>(v)];
            }
            sum += m;
        }
        return sum;
    }

    static Complex monomial(const Exponent& a, const CVector& x) {
        Complex m{1.0, 0.0};
        for (std::size_t v = 0; v < a.size(); ++v)
            for (int r = 0; r < a[v]; ++r) m *= x[static_cast<Eigen::Index>(v)];
        return m;
    }

  private:
    std::size_t num_vars_;
    std::vector<Term> terms_;
};

enum class Formulation { Exp, SinCos, Other };

inline const char* formulation_name(Formulation f) {
    switch (f) {
        case Formulation::Exp: return "exp";
        case Formulation::SinCos: return "sincos";
        case Formulation::Other: return "other";
    }
    return "?";
}

struct PolynomialSystem {
    std::vector<Polynomial> polys;
    std::vector<std::string> var_names;
    Formulation tag = Formulation::Other;

    std::size_t num_vars() const noexcept { return var_names.size(); }
    std::size_t size() const noexcept { return polys.size(); }
    bool is_square() const noexcept { return polys.size() == var_names.size(); }

    CVector evaluate(const CVector& x) const {
        check_point(x);
        CVector f(static_cast<Eigen::Index>(polys.size()));
        for (std::size_t i = 0; i < polys.size(); ++i) f[static_cast<Eigen::Index>(i)] = polys[i].evaluate(x);
        return f;
    }

    CMatrix jacobian(const CVector& x) const {
        check_point(x);
        CMatrix J(static_cast<Eigen::Index>(polys.size()), static_cast<Eigen::Index>(num_vars()));
        for (std::size_t i = 0; i < polys.size(); ++i)
            for (std::size_t k = 0; k < num_vars(); ++k)
                J(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(k)) = polys[i].derivative(k, x);
        return J;
    }

    double residual(const CVector& x) const { return evaluate(x).cwiseAbs().maxCoeff(); }

  private:
    void check_point(const CVector& x) const {
        if (static_cast<std::size_t>(x.size()) != num_vars())
            throw std::invalid_argument("point has " + std::to_string(x.size()) + " coordinates, system has " +
                                        std::to_string(num_vars()) + " variables");
    }
};

/**
 * Text dump, one polynomial per line:
 *   (c_re, c_im) * x1^1 y2^1 + (c_re, c_im) * x1^1 + (c_re, c_im)
 */
inline std::string dump_system(const PolynomialSystem& sys) {
    std::ostringstream out;
    out << std::setprecision(std::numeric_limits<double>::max_digits10);
    for (const auto& p : sys.polys) {
        bool first = true;
        for (const auto& t : p.terms()) {
            if (!first) out << " + ";
            first = false;
            out << '(' << t.coefficient.real() + 0.0 << ", " << t.coefficient.imag() + 0.0 << ')';  // + 0.0 drops -0
            bool star = false;
            for (std::size_t v = 0; v < t.exponents.size(); ++v) {
                if (t.exponents[v] == 0) continue;
                out << (star ? " " : " * ") << sys.var_names[v] << '^' << t.exponents[v];
                star = true;
            }
        }
        if (first) out << "(0, 0)";
        out << '\n';
    }
    return out.str();
}

}  // namespace kbkk
