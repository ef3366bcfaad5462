#pragma once

#include <cmath>
#include <complex>

namespace egm {

using Complex = std::complex<double>;

inline constexpr Complex IMAG_UNIT{0.0, 1.0};

inline bool finite(const Complex& z) {
    return std::isfinite(z.real()) && std::isfinite(z.imag());
}

/// 3-vector with complex components along the orthonormal basis e1,e2,e3.
struct Vec3c {
    Complex x{}, y{}, z{};

    constexpr Vec3c() = default;
    constexpr Vec3c(Complex cx, Complex cy, Complex cz) : x(cx), y(cy), z(cz) {}

    Vec3c operator+(const Vec3c& o) const { return {x + o.x, y + o.y, z + o.z}; }
    Vec3c operator-(const Vec3c& o) const { return {x - o.x, y - o.y, z - o.z}; }
    Vec3c operator-() const { return {-x, -y, -z}; }
    Vec3c& operator+=(const Vec3c& o) { x += o.x; y += o.y; z += o.z; return *this; }
    Vec3c& operator-=(const Vec3c& o) { x -= o.x; y -= o.y; z -= o.z; return *this; }
};

inline Vec3c operator*(const Complex& c, const Vec3c& v) { return {c * v.x, c * v.y, c * v.z}; }
inline Vec3c operator*(const Vec3c& v, const Complex& c) { return c * v; }
inline Vec3c operator*(double c, const Vec3c& v) { return {c * v.x, c * v.y, c * v.z}; }

/// Bilinear dot product (a,b) = sum a_i b_i. Not hermitian.
inline Complex dot(const Vec3c& a, const Vec3c& b) {
    return a.x * b.x + a.y * b.y + a.z * b.z;
}

/// Cross product [a,b], Levi-Civita orientation e1 x e2 = e3.
inline Vec3c cross(const Vec3c& a, const Vec3c& b) {
    return {a.y * b.z - a.z * b.y,
            a.z * b.x - a.x * b.z,
            a.x * b.y - a.y * b.x};
}

inline Vec3c conj(const Vec3c& v) { return {std::conj(v.x), std::conj(v.y), std::conj(v.z)}; }

inline double norm_sq(const Vec3c& v) {
    return std::norm(v.x) + std::norm(v.y) + std::norm(v.z);
}

inline bool finite(const Vec3c& v) { return finite(v.x) && finite(v.y) && finite(v.z); }

/// Real 3-vector convenience (media inputs, Poynting vectors, boost axes).
struct Vec3 {
    double x = 0.0, y = 0.0, z = 0.0;

    Vec3 operator+(const Vec3& o) const { return {x + o.x, y + o.y, z + o.z}; }
    Vec3 operator-(const Vec3& o) const { return {x - o.x, y - o.y, z - o.z}; }
    Vec3 operator-() const { return {-x, -y, -z}; }
    Vec3c complexified() const { return {Complex(x), Complex(y), Complex(z)}; }
};

inline Vec3 operator*(double c, const Vec3& v) { return {c * v.x, c * v.y, c * v.z}; }
inline double dot(const Vec3& a, const Vec3& b) { return a.x * b.x + a.y * b.y + a.z * b.z; }
inline Vec3 cross(const Vec3& a, const Vec3& b) {
    return {a.y * b.z - a.z * b.y, a.z * b.x - a.x * b.z, a.x * b.y - a.y * b.x};
}
inline double norm(const Vec3& v) { return std::sqrt(dot(v, v)); }

/// Biquaternion F = f + F: complex scalar part plus complex 3-vector part.
///
/// The product follows the quaternion rule
///   (f + F)(g + G) = (fg - (F,G)) + (fG + gF + [F,G]),
/// associative and noncommutative. All algebra here is pure and allocation
/// free; values are immutable in the sense that no operation mutates its
/// inputs.
struct Biquaternion {
    Complex s{};   // scalar part f
    Vec3c v{};     // vector part F

    constexpr Biquaternion() = default;
    constexpr Biquaternion(Complex scalar, Vec3c vector) : s(scalar), v(vector) {}
    explicit constexpr Biquaternion(Complex scalar) : s(scalar), v() {}

    static Biquaternion scalar(Complex f) { return Biquaternion{f, {}}; }
    static Biquaternion vector(const Vec3c& V) { return Biquaternion{Complex{}, V}; }

    Biquaternion operator+(const Biquaternion& o) const { return {s + o.s, v + o.v}; }
    Biquaternion operator-(const Biquaternion& o) const { return {s - o.s, v - o.v}; }
    Biquaternion operator-() const { return {-s, -v}; }
    Biquaternion& operator+=(const Biquaternion& o) { s += o.s; v += o.v; return *this; }
    Biquaternion& operator-=(const Biquaternion& o) { s -= o.s; v -= o.v; return *this; }
};

inline Biquaternion operator*(const Complex& c, const Biquaternion& a) {
    return {c * a.s, c * a.v};
}
inline Biquaternion operator*(double c, const Biquaternion& a) {
    return {c * a.s, Complex(c) * a.v};
}

/// Quaternion product a∘b.
inline Biquaternion mul(const Biquaternion& a, const Biquaternion& b) {
    return {a.s * b.s - dot(a.v, b.v),
            a.s * b.v + b.s * a.v + cross(a.v, b.v)};
}
inline Biquaternion operator*(const Biquaternion& a, const Biquaternion& b) { return mul(a, b); }

/// Complex conjugate: bar(f + F) = conj(f) + conj(F). Ring homomorphism.
inline Biquaternion bar(const Biquaternion& a) { return {std::conj(a.s), conj(a.v)}; }

/// Quaternion conjugate combined with complex conjugation:
/// star(f + F) = conj(f) - conj(F). Antihomomorphism: star(ab) = star(b)star(a).
inline Biquaternion star(const Biquaternion& a) { return {std::conj(a.s), -conj(a.v)}; }

/// Symmetric bilinear scalar product (a,b) = f1 f2 + (F1,F2). Not hermitian.
inline Complex dot(const Biquaternion& a, const Biquaternion& b) {
    return a.s * b.s + dot(a.v, b.v);
}

inline double norm_sq(const Biquaternion& a) { return std::norm(a.s) + norm_sq(a.v); }

/// Norm sqrt(|f|^2 + ||F||^2); zero iff a = 0.
inline double norm(const Biquaternion& a) { return std::sqrt(norm_sq(a)); }

/// Pseudonorm squared <a>^2 = a∘bar(a). A full biquaternion in general; for
/// an event Z = tau + i x with real tau, x the vector part vanishes and the
/// scalar part is the Minkowski interval tau^2 - ||x||^2.
inline Biquaternion pseudonorm_sq(const Biquaternion& a) { return mul(a, bar(a)); }

inline bool finite(const Biquaternion& a) { return finite(a.s) && finite(a.v); }

/// Event biquaternion Z = tau + i x.
inline Biquaternion event(double tau, const Vec3& x) {
    return {Complex(tau), {Complex(0.0, x.x), Complex(0.0, x.y), Complex(0.0, x.z)}};
}

inline constexpr Biquaternion BQ_ONE{Complex(1.0), {}};

} // namespace egm
