#include "pvarlevy/path.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <fstream>
#include <istream>
#include <ostream>
#include <sstream>

#include "pvarlevy/errors.hpp"

namespace pvarlevy {

const char* to_string(NodeKind kind) {
    switch (kind) {
        case NodeKind::Continuity: return "c";
        case NodeKind::PreJump: return "pre";
        case NodeKind::PostJump: return "post";
    }
    return "?";
}

NodeKind node_kind_from_string(const std::string& s) {
    if (s == "c") return NodeKind::Continuity;
    if (s == "pre") return NodeKind::PreJump;
    if (s == "post") return NodeKind::PostJump;
    throw ValidationError("unknown node kind '" + s + "'");
}

bool CadlagPath::has_jumps() const {
    return std::find(kinds_.begin(), kinds_.end(), NodeKind::PreJump) != kinds_.end();
}

PathBuilder::PathBuilder(std::size_t dim) {
    if (dim == 0) throw ValidationError("path dimension must be positive");
    path_.dim_ = dim;
}

PathBuilder& PathBuilder::add(double t, const Point& x) {
    return add(t, x.coords(), NodeKind::Continuity);
}

PathBuilder& PathBuilder::add(double t, std::span<const double> x, NodeKind kind) {
    if (x.size() != path_.dim_) throw ValidationError("node dimension mismatch");
    path_.times_.push_back(t);
    path_.kinds_.push_back(kind);
    path_.values_.insert(path_.values_.end(), x.begin(), x.end());
    return *this;
}

PathBuilder& PathBuilder::add_jump(double t, const Point& left, const Point& value) {
    add(t, left.coords(), NodeKind::PreJump);
    return add(t, value.coords(), NodeKind::PostJump);
}

CadlagPath PathBuilder::build() && {
    const auto& ts = path_.times_;
    const auto& ks = path_.kinds_;
    if (ts.empty()) throw ValidationError("path has no nodes");
    if (!(ts.front() >= 0.0)) throw ValidationError("path starts before time 0");
    for (double v : path_.values_)
        if (!std::isfinite(v)) throw ValidationError("path has a non-finite value");
    for (std::size_t i = 0; i < ts.size(); ++i) {
        if (!std::isfinite(ts[i])) throw ValidationError("path has a non-finite time");
        if (i > 0 && ts[i] < ts[i - 1]) throw ValidationError("path times decrease");
        switch (ks[i]) {
            case NodeKind::PreJump:
                if (i + 1 >= ts.size() || ks[i + 1] != NodeKind::PostJump || ts[i + 1] != ts[i])
                    throw ValidationError("pre-jump node not followed by a post-jump node at the same time");
                if (i > 0 && ts[i - 1] == ts[i])
                    throw ValidationError("two nodes share a jump time");
                break;
            case NodeKind::PostJump:
                if (i == 0 || ks[i - 1] != NodeKind::PreJump)
                    throw ValidationError("post-jump node without a preceding pre-jump node");
                if (i + 1 < ts.size() && ts[i + 1] == ts[i])
                    throw ValidationError("two nodes share a jump time");
                break;
            case NodeKind::Continuity:
                if (i > 0 && ts[i - 1] == ts[i])
                    throw ValidationError("continuity nodes at duplicated time");
                break;
        }
    }
    return std::move(path_);
}

Subspace::Subspace(std::size_t ambient_dim, std::vector<Point> basis)
    : ambient_(ambient_dim), basis_(std::move(basis)) {
    if (basis_.size() > ambient_) throw ValidationError("subspace basis larger than ambient dimension");
    for (std::size_t i = 0; i < basis_.size(); ++i) {
        if (basis_[i].dim() != ambient_) throw ValidationError("subspace basis dimension mismatch");
        for (std::size_t j = i; j < basis_.size(); ++j) {
            double target = i == j ? 1.0 : 0.0;
            if (std::abs(basis_[i].dot(basis_[j]) - target) > 1e-12)
                throw ValidationError("subspace basis is not orthonormal");
        }
    }
}

Subspace Subspace::full(std::size_t d) {
    std::vector<Point> b;
    for (std::size_t i = 0; i < d; ++i) {
        Point e(d);
        e[i] = 1.0;
        b.push_back(e);
    }
    return Subspace(d, std::move(b));
}

Subspace Subspace::zero(std::size_t d) { return Subspace(d, {}); }

Subspace Subspace::span_of(std::size_t d, const std::vector<Point>& vectors, double tol) {
    std::vector<Point> basis;
    for (const auto& v : vectors) {
        if (v.dim() != d) throw ValidationError("span_of: dimension mismatch");
        Point w = v;
        // two passes of modified Gram-Schmidt keep orthonormality at 1e-15
        for (int pass = 0; pass < 2; ++pass)
            for (const auto& b : basis) w -= w.dot(b) * b;
        double n = w.norm();
        if (n > tol * std::max(1.0, v.norm())) basis.push_back((1.0 / n) * w);
        if (basis.size() == d) break;
    }
    return Subspace(d, std::move(basis));
}

Point Subspace::project(const Point& x) const {
    if (x.dim() != ambient_) throw ValidationError("projection dimension mismatch");
    Point out(ambient_);
    for (const auto& b : basis_) out += x.dot(b) * b;
    return out;
}

Subspace Subspace::orthogonal_complement() const {
    std::vector<Point> candidates = basis_;
    for (std::size_t i = 0; i < ambient_; ++i) {
        Point e(ambient_);
        e[i] = 1.0;
        candidates.push_back(e);
    }
    Subspace all = span_of(ambient_, candidates);
    std::vector<Point> rest(all.basis().begin() + static_cast<std::ptrdiff_t>(basis_.size()), all.basis().end());
    return Subspace(ambient_, std::move(rest));
}

namespace {

void check_domain(const CadlagPath& path, double t) {
    if (path.empty()) throw ValidationError("empty path");
    if (!(t >= path.start_time() && t <= path.end_time()))
        throw ValidationError("time " + std::to_string(t) + " outside path domain [" +
                              std::to_string(path.start_time()) + ", " + std::to_string(path.end_time()) + "]");
}

// Index of the last node with time <= t.
std::size_t last_at_or_before(const CadlagPath& path, double t) {
    const auto& ts = path.times();
    auto it = std::upper_bound(ts.begin(), ts.end(), t);
    return static_cast<std::size_t>(it - ts.begin()) - 1;
}

Point interpolate(const CadlagPath& path, std::size_t k, double t) {
    if (path.time(k) == t || k + 1 >= path.size()) return path.point(k);
    double t0 = path.time(k), t1 = path.time(k + 1);
    double w = (t - t0) / (t1 - t0);
    auto a = path.value(k);
    auto b = path.value(k + 1);
    Point out(path.dim());
    for (std::size_t i = 0; i < path.dim(); ++i) out[i] = a[i] + w * (b[i] - a[i]);
    return out;
}

}  // namespace

Point evaluate(const CadlagPath& path, double t) {
    check_domain(path, t);
    return interpolate(path, last_at_or_before(path, t), t);
}

Point left_limit(const CadlagPath& path, double t) {
    check_domain(path, t);
    std::size_t k = last_at_or_before(path, t);
    if (path.time(k) == t && path.kind(k) == NodeKind::PostJump) return path.point(k - 1);
    return interpolate(path, k, t);
}

CadlagPath project(const CadlagPath& path, const Subspace& sub) {
    if (sub.ambient_dim() != path.dim()) throw ValidationError("projection dimension mismatch");
    PathBuilder b(path.dim());
    for (std::size_t i = 0; i < path.size(); ++i)
        b.add(path.time(i), sub.project(path.point(i)).coords(), path.kind(i));
    return std::move(b).build();
}

CadlagPath combine(const CadlagPath& a, const CadlagPath& b, double wa, double wb) {
    if (a.dim() != b.dim()) throw ValidationError("combine: dimension mismatch");
    double lo = std::max(a.start_time(), b.start_time());
    double hi = std::min(a.end_time(), b.end_time());
    if (lo > hi) throw ValidationError("combine: paths have disjoint time domains");
    std::vector<double> grid;
    grid.reserve(a.size() + b.size() + 2);
    for (double t : a.times())
        if (t >= lo && t <= hi) grid.push_back(t);
    for (double t : b.times())
        if (t >= lo && t <= hi) grid.push_back(t);
    grid.push_back(lo);
    grid.push_back(hi);
    std::sort(grid.begin(), grid.end());
    grid.erase(std::unique(grid.begin(), grid.end()), grid.end());

    PathBuilder out(a.dim());
    for (double t : grid) {
        Point value = wa * evaluate(a, t) + wb * evaluate(b, t);
        Point left = wa * left_limit(a, t) + wb * left_limit(b, t);
        if (t > lo && !(left == value))
            out.add_jump(t, left, value);
        else
            out.add(t, value);
    }
    return std::move(out).build();
}

CadlagPath restrict(const CadlagPath& path, double a, double b) {
    if (!(a <= b)) throw ValidationError("restrict: empty window");
    check_domain(path, a);
    check_domain(path, b);
    PathBuilder out(path.dim());
    out.add(a, evaluate(path, a));
    for (std::size_t i = 0; i < path.size(); ++i) {
        double t = path.time(i);
        if (t > a && t < b) out.add(t, path.value(i), path.kind(i));
    }
    if (b > a) {
        Point left = left_limit(path, b);
        Point value = evaluate(path, b);
        if (left == value)
            out.add(b, value);
        else
            out.add_jump(b, left, value);
    }
    return std::move(out).build();
}

std::vector<Jump> jump_list(const CadlagPath& path) {
    std::vector<Jump> out;
    for (std::size_t i = 0; i + 1 < path.size(); ++i) {
        if (path.kind(i) != NodeKind::PreJump) continue;
        out.push_back({path.time(i), path.point(i + 1) - path.point(i)});
    }
    return out;
}

void write_csv(std::ostream& os, const CadlagPath& path) {
    os << "time,kind";
    for (std::size_t k = 1; k <= path.dim(); ++k) os << ",x" << k;
    os << '\n';
    char buf[40];
    for (std::size_t i = 0; i < path.size(); ++i) {
        std::snprintf(buf, sizeof buf, "%.17g", path.time(i));
        os << buf << ',' << to_string(path.kind(i));
        for (double v : path.value(i)) {
            std::snprintf(buf, sizeof buf, "%.17g", v);
            os << ',' << buf;
        }
        os << '\n';
    }
}

namespace {

std::vector<std::string> split_csv_line(const std::string& line) {
    std::vector<std::string> out;
    std::string cell;
    std::istringstream ss(line);
    while (std::getline(ss, cell, ',')) {
        while (!cell.empty() && (cell.back() == '\r' || cell.back() == ' ')) cell.pop_back();
        std::size_t start = cell.find_first_not_of(' ');
        out.push_back(start == std::string::npos ? std::string() : cell.substr(start));
    }
    return out;
}

double parse_double(const std::string& s) {
    // strtod rather than stod: subnormals set ERANGE but parse exactly
    char* end = nullptr;
    double v = std::strtod(s.c_str(), &end);
    if (s.empty() || end != s.c_str() + s.size() || !std::isfinite(v))
        throw ValidationError("not a number: '" + s + "'");
    return v;
}

}  // namespace

CadlagPath read_csv(std::istream& is) {
    std::string line;
    if (!std::getline(is, line)) throw ValidationError("path CSV is empty");
    auto header = split_csv_line(line);
    if (header.size() < 3 || header[0] != "time" || header[1] != "kind")
        throw ValidationError("path CSV header must be time,kind,x1..xd");
    std::size_t dim = header.size() - 2;
    PathBuilder b(dim);
    std::vector<double> x(dim);
    std::size_t lineno = 1;
    while (std::getline(is, line)) {
        ++lineno;
        if (line.empty() || line == "\r") continue;
        auto cells = split_csv_line(line);
        if (cells.size() != dim + 2)
            throw ValidationError("path CSV line " + std::to_string(lineno) + ": wrong column count");
        for (std::size_t k = 0; k < dim; ++k) x[k] = parse_double(cells[k + 2]);
        b.add(parse_double(cells[0]), x, node_kind_from_string(cells[1]));
    }
    return std::move(b).build();
}

void save_csv(const std::string& file, const CadlagPath& path) {
    std::ofstream os(file);
    if (!os) throw ValidationError("cannot write " + file);
    write_csv(os, path);
}

CadlagPath load_csv(const std::string& file) {
    std::ifstream is(file);
    if (!is) throw ValidationError("cannot read " + file);
    return read_csv(is);
}

}  // namespace pvarlevy
