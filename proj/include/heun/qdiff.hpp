#pragma once

#include "heun/abelian.hpp"
#include "heun/measures.hpp"
#include "heun/poly.hpp"

namespace heun {

// Rational quadratic differential -(U1/U2) dz^2 with monic U1, U2 and
// deg U2 - deg U1 = 2 (double pole at infinity, negative leading term).
// Evaluation goes through the factored form, which stays accurate next to
// the singular points.
struct QuadDiff {
  Polynomial u1, u2;
  std::vector<cplx> zeros;  // roots of u1
  std::vector<cplx> poles;  // roots of u2

  cplx ratio(cplx z) const;  // U1/U2
  cplx R(cplx z) const { return -ratio(z); }

  cplx center() const;    // centroid of the singular set
  double diameter() const;  // diameter of the singular set (1 if single point)
};

QuadDiff make_quad_diff(Polynomial u1, Polynomial u2);

// The differential (b - z)/Q(z) dz^2; cancels the pole when b hits a root.
QuadDiff heun_qdiff(const CubicRoots& roots, cplx b);

enum class TrajectoryKind { kHorizontal, kVertical };
enum class TerminalKind { kHit, kEscaped, kClosed, kExhausted };

struct Terminal {
  TerminalKind kind = TerminalKind::kExhausted;
  int vertex = -1;  // singular point index (zeros first, then poles) for kHit
};

struct TrajectorySegment {
  std::vector<cplx> points;
  int origin_vertex = -1;  // -1 for free starts
  int origin_dir = -1;
  Terminal terminal;
  TrajectoryKind kind = TrajectoryKind::kHorizontal;
  double capture_gap = 0.0;  // distance to the hit vertex at stop
  double level_drift = 0.0;  // worst deviation of the conserved level
};

struct TraceControls {
  double capture_radius = 0.0;  // default 1e-3 * diam
  double escape_radius = 0.0;   // default 50 * diam
  double launch_offset = 0.0;   // default 10 * capture_radius
  double max_arclength = 0.0;   // default 200 * diam
  double max_step = 0.0;        // default diam / 100
};

// Unit directions of the singular trajectories leaving a simple zero (three)
// or simple pole (one), sorted by angle.
std::vector<cplx> launch_directions(const QuadDiff& qd, cplx p,
                                    TrajectoryKind kind = TrajectoryKind::kHorizontal);

// Field-following trace from a regular start point with the given heading.
TrajectorySegment trace(const QuadDiff& qd, cplx start, cplx dir, TrajectoryKind kind,
                        const TraceControls& controls = {});

// Launches the singular trajectory with the given direction index.
TrajectorySegment trace_from_singular(const QuadDiff& qd, int vertex, int dir_index,
                                      TrajectoryKind kind, const TraceControls& controls = {});

struct GraphVertex {
  int id = 0;
  cplx pos;
  enum class Kind { kZero, kPole } kind = Kind::kZero;
};

struct GraphEdge {
  int id = 0;
  int v0 = 0, v1 = 0;          // endpoint vertex ids (equal for a loop)
  std::vector<cplx> polyline;  // from v0 to v1, endpoints snapped
  double capture_gap = 0.0;
  // filled by classify():
  int face_left = -1, face_right = -1;  // faces adjacent to the two sides
  bool dividing = false;
  bool preventing = false;
};

struct GraphFace {
  int id = 0;
  int depth = -1;
  bool unbounded = false;
};

enum class StrebelStatus { kStrebel, kNotStrebel, kInconclusive };

struct SingularGraph {
  QuadDiff qd;
  std::vector<GraphVertex> vertices;
  std::vector<GraphEdge> edges;
  std::vector<GraphFace> faces;  // populated by classify()
  StrebelStatus status = StrebelStatus::kInconclusive;
  bool is_strebel() const { return status == StrebelStatus::kStrebel; }
  bool classified = false;
  std::vector<TrajectorySegment> raw;  // every launched segment

  // d = number of complement components (faces including the unbounded one)
  int num_components() const { return static_cast<int>(faces.size()); }
};

// Launches every singular direction, merges the traced pairs into edges.
SingularGraph singular_graph(const QuadDiff& qd, const TraceControls& controls = {});

// Face decomposition, depths, dividing/preventing labels.  Requires a
// Strebel graph.
void classify(SingularGraph& graph);

// Positivity criterion on the classified graph: no dividing edge between
// equal depths and no preventing edge.
bool admits_positive(const SingularGraph& graph);

// One square-root branch choice per bounded face and the signed support it
// induces.
struct SignedMeasureSpec {
  std::vector<int> branch_bits;  // per bounded face, in face id order
  struct EdgeSupport {
    int edge = 0;
    int sign = +1;
  };
  std::vector<EdgeSupport> support;  // edges absent here carry no mass
  DiscreteMeasure measure;           // discretized at points_per_edge
  bool all_positive() const;
};

// All 2^(d-1) real measures supported on the singular graph.
std::vector<SignedMeasureSpec> enumerate_measures(const QuadDiff& qd, SingularGraph& graph,
                                                  int points_per_edge);

}  // namespace heun
