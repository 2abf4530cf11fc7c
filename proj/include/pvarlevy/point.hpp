#pragma once

#include <cmath>
#include <cstddef>
#include <initializer_list>
#include <span>
#include <vector>

namespace pvarlevy {

/// A point of R^d. Thin value wrapper over a coordinate vector; the dimension
/// is fixed by the context (path, model, vector field) that owns it.
class Point {
public:
    Point() = default;
    explicit Point(std::size_t dim) : c_(dim, 0.0) {}
    Point(std::initializer_list<double> coords) : c_(coords) {}
    explicit Point(std::vector<double> coords) : c_(std::move(coords)) {}
    explicit Point(std::span<const double> coords) : c_(coords.begin(), coords.end()) {}

    std::size_t dim() const { return c_.size(); }
    double& operator[](std::size_t i) { return c_[i]; }
    double operator[](std::size_t i) const { return c_[i]; }
    std::span<const double> coords() const { return c_; }
    const std::vector<double>& vec() const { return c_; }

    Point& operator+=(const Point& o) {
        for (std::size_t i = 0; i < c_.size(); ++i) c_[i] += o.c_[i];
        return *this;
    }
    Point& operator-=(const Point& o) {
        for (std::size_t i = 0; i < c_.size(); ++i) c_[i] -= o.c_[i];
        return *this;
    }
    Point& operator*=(double s) {
        for (auto& x : c_) x *= s;
        return *this;
    }
    friend Point operator+(Point a, const Point& b) { return a += b; }
    friend Point operator-(Point a, const Point& b) { return a -= b; }
    friend Point operator*(double s, Point a) { return a *= s; }
    friend Point operator*(Point a, double s) { return a *= s; }
    friend Point operator-(Point a) { return a *= -1.0; }
    friend bool operator==(const Point&, const Point&) = default;

    double dot(const Point& o) const {
        double s = 0.0;
        for (std::size_t i = 0; i < c_.size(); ++i) s += c_[i] * o.c_[i];
        return s;
    }
    double squared_norm() const { return dot(*this); }
    double norm() const { return std::sqrt(squared_norm()); }
    bool is_finite() const {
        for (double x : c_)
            if (!std::isfinite(x)) return false;
        return true;
    }

private:
    std::vector<double> c_;
};

inline double distance(const Point& a, const Point& b) { return (a - b).norm(); }

}  // namespace pvarlevy
