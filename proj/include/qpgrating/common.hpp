#pragma once

#include <complex>
#include <cstddef>
#include <numbers>
#include <stdexcept>
#include <string>

namespace qpg {

using cplx = std::complex<double>;

inline constexpr double pi = std::numbers::pi;
inline constexpr double two_pi = 2.0 * std::numbers::pi;
inline constexpr double euler_gamma = std::numbers::egamma;
inline constexpr cplx I{0.0, 1.0};

struct Vec2 {
    double x = 0.0;
    double y = 0.0;
};

inline Vec2 operator+(Vec2 a, Vec2 b) { return {a.x + b.x, a.y + b.y}; }
inline Vec2 operator-(Vec2 a, Vec2 b) { return {a.x - b.x, a.y - b.y}; }
inline Vec2 operator*(double s, Vec2 a) { return {s * a.x, s * a.y}; }
inline double dot(Vec2 a, Vec2 b) { return a.x * b.x + a.y * b.y; }
inline double norm(Vec2 a) { return std::hypot(a.x, a.y); }

/// Base class for all library errors; `code` maps onto CLI exit statuses.
class Error : public std::runtime_error {
public:
    enum class Kind { domain, geometry, wood, singular_point, window, numerical, config, resource };
    Error(Kind kind, const std::string& what) : std::runtime_error(what), kind_(kind) {}
    Kind kind() const { return kind_; }

private:
    Kind kind_;
};

inline Error domain_error(const std::string& m) { return Error(Error::Kind::domain, m); }
inline Error geometry_error(const std::string& m) { return Error(Error::Kind::geometry, m); }
inline Error wood_error(const std::string& m) { return Error(Error::Kind::wood, m); }
inline Error singular_error(const std::string& m) { return Error(Error::Kind::singular_point, m); }
inline Error window_error(const std::string& m) { return Error(Error::Kind::window, m); }
inline Error numerical_error(const std::string& m) { return Error(Error::Kind::numerical, m); }
inline Error config_error(const std::string& m) { return Error(Error::Kind::config, m); }
inline Error resource_error(const std::string& m) { return Error(Error::Kind::resource, m); }

/// Index of mode j in a vector holding modes -N..N.
inline std::size_t mode_index(int j, int N) { return static_cast<std::size_t>(j + N); }

}  // namespace qpg
