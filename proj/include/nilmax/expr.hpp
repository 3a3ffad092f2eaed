#pragma once

#include <complex>
#include <functional>
#include <memory>
#include <string>
#include <vector>

namespace nilmax {

using cplx = std::complex<double>;

// Value and first derivative.
struct Dual {
    cplx v{0.0, 0.0};
    cplx d{0.0, 0.0};
};

// Closed-form expression in one variable (x or z), complex arithmetic, with
// + - * / ^, sin cos tan exp log sqrt sinh cosh, constants i, pi, e.
// Substituting a complex argument is the holomorphic extension of real data.
class Expr {
public:
    struct Node;

    Expr();
    static Expr parse(const std::string& source);
    static Expr constant(cplx c);

    cplx operator()(cplx z) const;
    Dual eval_dual(cplx z) const;
    const std::string& source() const { return source_; }

private:
    std::shared_ptr<const Node> root_;
    std::string source_;
};

// Holomorphic scalar function with derivative.
struct HoloFn {
    std::function<Dual(cplx)> fn;

    cplx operator()(cplx z) const { return fn(z).v; }
    cplx deriv(cplx z) const { return fn(z).d; }

    static HoloFn constant(cplx c);
    static HoloFn polynomial(std::vector<cplx> coeffs);  // c0 + c1 z + ...
    static HoloFn from_expr(const Expr& e);
    static HoloFn parse(const std::string& source);
};

HoloFn operator+(const HoloFn& a, const HoloFn& b);
HoloFn operator*(const HoloFn& a, const HoloFn& b);
HoloFn operator*(cplx s, const HoloFn& a);

}  // namespace nilmax
