#pragma once

#include <cmath>
#include <stdexcept>
#include <string>

namespace mars {

struct Point2 {
    double x = 0.0;
    double y = 0.0;

    Point2& operator+=(const Point2& o) { x += o.x; y += o.y; return *this; }
    Point2& operator-=(const Point2& o) { x -= o.x; y -= o.y; return *this; }
    Point2& operator*=(double s) { x *= s; y *= s; return *this; }
    friend Point2 operator+(Point2 a, const Point2& b) { return a += b; }
    friend Point2 operator-(Point2 a, const Point2& b) { return a -= b; }
    friend Point2 operator*(double s, Point2 a) { return a *= s; }
    friend Point2 operator*(Point2 a, double s) { return a *= s; }
    friend bool operator==(const Point2&, const Point2&) = default;
};

inline double norm(const Point2& p) { return std::hypot(p.x, p.y); }
inline double dist(const Point2& a, const Point2& b) { return norm(a - b); }
inline double cross(const Point2& a, const Point2& b) { return a.x * b.y - a.y * b.x; }
inline double dot(const Point2& a, const Point2& b) { return a.x * b.x + a.y * b.y; }
inline bool is_finite(const Point2& p) { return std::isfinite(p.x) && std::isfinite(p.y); }

// Base for every error raised by the library. Subclasses let callers tell
// input problems apart from numerical breakdowns.
class Error : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

class DegenerateError : public Error {
public:
    using Error::Error;
};

class PreconditionError : public Error {
public:
    using Error::Error;
};

// Marker resolution too coarse for the geometry.
class ResolutionError : public Error {
public:
    using Error::Error;
};

class AssemblyError : public Error {
public:
    using Error::Error;
};

class ConfigError : public Error {
public:
    using Error::Error;
};

}  // namespace mars
