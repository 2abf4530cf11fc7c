#pragma once

#include <cstddef>
#include <iosfwd>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include "pvarlevy/point.hpp"

namespace pvarlevy {

enum class NodeKind : unsigned char { Continuity, PreJump, PostJump };

const char* to_string(NodeKind kind);
NodeKind node_kind_from_string(const std::string& s);

/// A càdlàg path on R^d stored as a time-ordered node list.
///
/// Between consecutive nodes at distinct times the path is linear; a jump at
/// time t is a PreJump node (the left limit) immediately followed by a
/// PostJump node at the bit-identical time (the value). Paths are immutable;
/// construct them with PathBuilder, which validates the layout once.
class CadlagPath {
public:
    CadlagPath() = default;

    std::size_t dim() const { return dim_; }
    std::size_t size() const { return times_.size(); }
    bool empty() const { return times_.empty(); }

    double time(std::size_t i) const { return times_[i]; }
    NodeKind kind(std::size_t i) const { return kinds_[i]; }
    std::span<const double> value(std::size_t i) const {
        return {values_.data() + i * dim_, dim_};
    }
    Point point(std::size_t i) const { return Point(value(i)); }

    double start_time() const { return times_.front(); }
    double end_time() const { return times_.back(); }

    const std::vector<double>& times() const { return times_; }
    const std::vector<NodeKind>& kinds() const { return kinds_; }
    /// Row-major node values, size() * dim() entries.
    const std::vector<double>& flat_values() const { return values_; }

    bool has_jumps() const;

private:
    friend class PathBuilder;
    std::size_t dim_ = 0;
    std::vector<double> times_;
    std::vector<NodeKind> kinds_;
    std::vector<double> values_;
};

class PathBuilder {
public:
    explicit PathBuilder(std::size_t dim);

    PathBuilder& add(double t, const Point& x);
    PathBuilder& add(double t, std::span<const double> x, NodeKind kind);
    /// Appends a pre/post pair at t.
    PathBuilder& add_jump(double t, const Point& left_limit, const Point& value);

    std::size_t size() const { return path_.times_.size(); }

    /// Validates and returns the path. Throws ValidationError on a layout
    /// violation (decreasing times, unpaired jump nodes, duplicated times,
    /// non-finite values).
    CadlagPath build() &&;

private:
    CadlagPath path_;
};

/// Orthonormal basis of a linear subspace of R^d.
class Subspace {
public:
    Subspace() = default;
    /// Throws ValidationError unless the basis is orthonormal within 1e-12.
    Subspace(std::size_t ambient_dim, std::vector<Point> basis);

    static Subspace full(std::size_t d);
    static Subspace zero(std::size_t d);
    /// Gram-Schmidt orthonormalisation of a spanning list (dropping dependent vectors).
    static Subspace span_of(std::size_t d, const std::vector<Point>& vectors, double tol = 1e-10);

    std::size_t ambient_dim() const { return ambient_; }
    std::size_t rank() const { return basis_.size(); }
    const std::vector<Point>& basis() const { return basis_; }

    Point project(const Point& x) const;
    Subspace orthogonal_complement() const;

private:
    std::size_t ambient_ = 0;
    std::vector<Point> basis_;
};

Point evaluate(const CadlagPath& path, double t);
Point left_limit(const CadlagPath& path, double t);

CadlagPath project(const CadlagPath& path, const Subspace& sub);

/// Pointwise weighted sum on the union node grid, restricted to the common
/// time domain of the two paths. A jump is kept iff the weighted jump sum is
/// nonzero.
CadlagPath combine(const CadlagPath& a, const CadlagPath& b, double wa, double wb);

/// Restriction to [a, b]: the value at a, every node strictly inside, and the
/// left limit and value at b.
CadlagPath restrict(const CadlagPath& path, double a, double b);

struct Jump {
    double time;
    Point size;
};
std::vector<Jump> jump_list(const CadlagPath& path);

/// CSV with header `time,kind,x1..xd`; kinds are c, pre, post. Values are
/// written with 17 significant digits so a round trip is bit-exact.
void write_csv(std::ostream& os, const CadlagPath& path);
CadlagPath read_csv(std::istream& is);
void save_csv(const std::string& file, const CadlagPath& path);
CadlagPath load_csv(const std::string& file);

}  // namespace pvarlevy
