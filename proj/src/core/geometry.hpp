#ifndef LAPLAB_CORE_GEOMETRY_HPP
#define LAPLAB_CORE_GEOMETRY_HPP

#include <map>
#include <optional>
#include <string>
#include <vector>

#include "core/types.hpp"

namespace laplab {

// Index set of the layer family. Cases: two-sided infinite, finite on one
// side, or finite on both. Only a finite contiguous window containing layer 0
// is ever instantiated; outside the window the medium repeats its last value.
enum class IndexSetKind {
  TwoSidedInfinite,
  LeftFiniteRightInfinite,
  LeftInfiniteRightFinite,
  Finite,
};

struct LayerIndexSet {
  IndexSetKind kind = IndexSetKind::Finite;
  int l_minus = 0;  // smallest layer index, for kinds with a finite left end
  int l_plus = 0;   // largest layer index, for kinds with a finite right end
  int window_lo = 0;
  int window_hi = 0;

  int window_size() const { return window_hi - window_lo + 1; }
  bool has_left_end() const {
    return kind == IndexSetKind::LeftFiniteRightInfinite ||
           kind == IndexSetKind::Finite;
  }
  bool has_right_end() const {
    return kind == IndexSetKind::LeftInfiniteRightFinite ||
           kind == IndexSetKind::Finite;
  }
  void validate() const;
};

enum class PartitionKind { PlanarStack, ConcentricCylinders };

// Result of locating a point in the partition: either a unique layer index or
// a hit on the interface between layer and layer+1.
struct ClassifyResult {
  bool on_interface = false;
  int layer = 0;  // for interface hits, the lower of the two adjacent layers
};

// Interface between layers (lower, lower+1). The locus is a plane offset
// along the stack axis or a cylinder radius; both sides share this object.
struct Interface {
  int lower_layer = 0;
  double locus = 0.0;
};

struct SurfacePoint {
  Point x{};
  Point normal{};  // oriented from the lower layer into the upper one
  double weight = 1.0;
};

// A family of open regions partitioning R^N: parallel slabs orthogonal to an
// axis, or concentric cylindrical shells around the x3-axis (annuli for N=2).
// Layer 0 contains the origin; indices grow outward/rightward. Immutable
// after construction; all queries are pure.
class LayeredPartition {
 public:
  static LayeredPartition planar(int dimension,
                                 const std::vector<double>& breakpoints,
                                 const Point& axis = {0, 0, 0});
  static LayeredPartition concentric(int dimension,
                                     const std::vector<double>& radii);

  int dimension() const { return n_; }
  PartitionKind kind() const { return kind_; }
  const std::vector<double>& breakpoints() const { return breakpoints_; }
  const Point& axis() const { return axis_; }
  const LayerIndexSet& index_set() const { return index_set_; }
  void set_index_set(const LayerIndexSet& s);

  int layer_count() const { return static_cast<int>(breakpoints_.size()) + 1; }
  int lowest_layer() const { return index_set_.window_lo; }
  int highest_layer() const { return index_set_.window_hi; }

  std::vector<Interface> interfaces() const;

  ClassifyResult classify(const Point& x, double tie_tol = 1e-12) const;

  // Unit outward normal of layer `layer` at a point within surf_tol of one of
  // its interfaces. Throws NotOnBoundary otherwise.
  Point outward_normal(int layer, const Point& x, double surf_tol) const;

  // Normal of the interface with the given lower layer, oriented lower->upper,
  // evaluated at x (which need not lie exactly on the locus).
  Point interface_normal(const Interface& iface, const Point& x) const;

  // Quasi-uniform sample of an interface restricted to the box |x|_inf <= box,
  // with surface-measure weights. `spacing` controls the sample pitch.
  std::vector<SurfacePoint> sample_interface(const Interface& iface,
                                             double spacing, double box) const;

 private:
  LayeredPartition() = default;

  int n_ = 3;
  PartitionKind kind_ = PartitionKind::PlanarStack;
  std::vector<double> breakpoints_;
  Point axis_{0, 0, 1};
  int origin_region_ = 0;  // region index containing the origin
  LayerIndexSet index_set_;
};

struct CertificateEntry {
  std::string condition;
  bool pass = false;
  std::map<std::string, double> constants;
  std::optional<Point> witness;
  std::string detail;
};

struct CertificateReport {
  std::vector<CertificateEntry> entries;
  bool pass = true;

  void add(CertificateEntry e) {
    pass = pass && e.pass;
    entries.push_back(std::move(e));
  }
  const CertificateEntry* find(const std::string& condition) const {
    for (const auto& e : entries)
      if (e.condition == condition) return &e;
    return nullptr;
  }
};

struct PartitionCheckOptions {
  double box = 0.0;          // half-width of the sampled box; 0 = derive
  int min_interface_samples = 1000;
  int cover_samples_per_axis = 21;
};

// Admissibility of the partition together with the per-layer values nu:
// covering/disjointness on a box sample, local finiteness, interface pairing
// with unit opposite normals, positive bounded values, and the interface sign
// condition (nu_l - nu_{l+1}) (n^(l)(x) . x) <= 0 on every interface.
CertificateReport validate_partition(const LayeredPartition& p,
                                     const std::vector<double>& nus,
                                     const PartitionCheckOptions& opts = {});

// Cone-type conditions on a two-region partition: |n_N| bounded below and
// |x . n| bounded above on the separating surface. Informational.
CertificateReport check_cone_condition(const LayeredPartition& p,
                                       const PartitionCheckOptions& opts = {});
CertificateReport check_cone_condition_on_samples(
    const std::vector<SurfacePoint>& samples, int dimension);

// Sign condition (nu_2 - nu_1)(x . n^(1)) >= 0 for a two-region partition,
// where region 1 contains the origin.
CertificateReport check_cylindrical_condition(
    const LayeredPartition& p, const std::vector<double>& nus,
    const PartitionCheckOptions& opts = {});
CertificateReport check_cylindrical_condition_on_samples(
    const std::vector<SurfacePoint>& samples, int dimension, double nu1,
    double nu2);

}  // namespace laplab

#endif
