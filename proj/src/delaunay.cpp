#include "delaunay.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <cstdint>
#include <deque>
#include <limits>
#include <stdexcept>
#include <string>
#include <unordered_map>

#include "neckfield/errors.hpp"

namespace neckfield::detail {

Vec2 BoundaryCurve::at(double s) const {
  if (kind == Kind::Line) return {p0.x + s * (p1.x - p0.x), p0.y + s * (p1.y - p0.y)};
  const double half = 0.5 * (s - pole_angle);
  const double mid = 0.5 * (s + pole_angle);
  const double sh = std::sin(half);
  return {pole.x - 2.0 * radius * std::sin(mid) * sh, pole.y + 2.0 * radius * std::cos(mid) * sh};
}

double BoundaryCurve::speed() const {
  return kind == Kind::Line ? norm(p1 - p0) : radius;
}

namespace {

using LD = long double;

LD orient(Vec2 a, Vec2 b, Vec2 c) {
  const LD abx = LD(b.x) - LD(a.x), aby = LD(b.y) - LD(a.y);
  const LD acx = LD(c.x) - LD(a.x), acy = LD(c.y) - LD(a.y);
  return abx * acy - aby * acx;
}

// Positive when d lies inside the circumcircle of the counterclockwise triangle abc.
LD incircle(Vec2 a, Vec2 b, Vec2 c, Vec2 d) {
  const LD adx = LD(a.x) - LD(d.x), ady = LD(a.y) - LD(d.y);
  const LD bdx = LD(b.x) - LD(d.x), bdy = LD(b.y) - LD(d.y);
  const LD cdx = LD(c.x) - LD(d.x), cdy = LD(c.y) - LD(d.y);
  const LD alift = adx * adx + ady * ady;
  const LD blift = bdx * bdx + bdy * bdy;
  const LD clift = cdx * cdx + cdy * cdy;
  return alift * (bdx * cdy - bdy * cdx) + blift * (cdx * ady - cdy * adx) +
         clift * (adx * bdy - ady * bdx);
}

Vec2 circumcenter(Vec2 a, Vec2 b, Vec2 c) {
  const LD bx = LD(b.x) - LD(a.x), by = LD(b.y) - LD(a.y);
  const LD cx = LD(c.x) - LD(a.x), cy = LD(c.y) - LD(a.y);
  const LD d = 2.0L * (bx * cy - by * cx);
  const LD b2 = bx * bx + by * by, c2 = cx * cx + cy * cy;
  const LD ux = (cy * b2 - by * c2) / d;
  const LD uy = (bx * c2 - cx * b2) / d;
  return {static_cast<double>(LD(a.x) + ux), static_cast<double>(LD(a.y) + uy)};
}

bool encroaches(Vec2 a, Vec2 b, Vec2 q) {
  return (LD(a.x) - LD(q.x)) * (LD(b.x) - LD(q.x)) + (LD(a.y) - LD(q.y)) * (LD(b.y) - LD(q.y)) <
         0.0L;
}

// Position along a Hilbert curve of order 32 for coordinates in [0, 1].
std::uint64_t hilbert_index(double fx, double fy) {
  constexpr std::uint64_t n = std::uint64_t{1} << 32;
  std::uint64_t x = static_cast<std::uint64_t>(std::clamp(fx, 0.0, 1.0) * 4294967295.0);
  std::uint64_t y = static_cast<std::uint64_t>(std::clamp(fy, 0.0, 1.0) * 4294967295.0);
  std::uint64_t d = 0;
  for (std::uint64_t s = n / 2; s > 0; s /= 2) {
    const std::uint64_t rx = (x & s) ? 1 : 0;
    const std::uint64_t ry = (y & s) ? 1 : 0;
    d += s * s * ((3 * rx) ^ ry);
    if (ry == 0) {
      if (rx == 1) {
        x = n - 1 - x;
        y = n - 1 - y;
      }
      std::swap(x, y);
    }
  }
  return d;
}

std::uint64_t edge_key(int a, int b) {
  if (a > b) std::swap(a, b);
  return (static_cast<std::uint64_t>(a) << 32) | static_cast<std::uint32_t>(b);
}

struct Tri {
  std::array<int, 3> v{};
  std::array<int, 3> n{-1, -1, -1};  // n[i] lies across the edge opposite v[i]
  bool alive = false;
  bool inside = false;
};

struct Seg {
  int a, b, curve;
  double sa, sb;
  bool alive;
};

class Refiner {
 public:
  Refiner(const Pslg& pslg, const SizeField& size, std::size_t max_vertices)
      : pslg_(pslg), size_(size), max_vertices_(max_vertices) {}

  RefineResult run();

 private:
  struct CavityEdge {
    int a, b;
    int outside;
    int outside_slot;
    int owner;
  };

  int new_tri(int a, int b, int c, bool inside);
  int index_in(const Tri& t, int v) const;
  int segment_at(int a, int b) const {
    auto it = seg_of_edge_.find(edge_key(a, b));
    return it == seg_of_edge_.end() ? -1 : it->second;
  }
  int add_segment(int a, int b, int curve, double sa, double sb);
  void remove_segment(int s);

  unsigned rand3() {
    rng_ ^= rng_ << 13;
    rng_ ^= rng_ >> 17;
    rng_ ^= rng_ << 5;
    return rng_ % 3u;
  }

  int locate(Vec2 p, int start, int* blocking_segment);
  void build_cavity(Vec2 p, int t0);
  int commit(Vec2 p);
  int insert(Vec2 p, int t0) {
    build_cavity(p, t0);
    return commit(p);
  }
  int add_vertex(Vec2 p);

  template <class F>
  void visit_fan(int v, F&& fn) const;
  int triangle_with_edge(int a, int b) const;

  int split_segment(int s);
  void relabel_fan(int pv, int a, int b);
  void classify();
  void refine_all();
  bool is_bad(int t) const;
  void queue_segment_check(int s);
  void queue_fan(int pv);

  const Pslg& pslg_;
  const SizeField& size_;
  std::size_t max_vertices_;

  std::vector<Vec2> pts_;
  std::vector<int> vt_;
  std::vector<Tri> tris_;
  std::vector<int> free_;
  std::vector<Seg> segs_;
  std::unordered_map<std::uint64_t, int> seg_of_edge_;

  std::vector<unsigned> mark_;
  unsigned epoch_ = 0;
  std::vector<int> cavity_;
  std::vector<CavityEdge> cavity_edges_;
  std::vector<int> created_;
  std::vector<int> starts_;

  bool labeled_ = false;
  int hint_ = 0;
  std::uint32_t rng_ = 2463534242u;

  std::deque<int> bad_queue_;
  std::deque<int> seg_queue_;
};

int Refiner::new_tri(int a, int b, int c, bool inside) {
  int id;
  if (!free_.empty()) {
    id = free_.back();
    free_.pop_back();
  } else {
    id = static_cast<int>(tris_.size());
    tris_.emplace_back();
    mark_.push_back(0);
  }
  Tri& t = tris_[id];
  t.v = {a, b, c};
  t.n = {-1, -1, -1};
  t.alive = true;
  t.inside = inside;
  vt_[a] = vt_[b] = vt_[c] = id;
  return id;
}

int Refiner::index_in(const Tri& t, int v) const {
  for (int i = 0; i < 3; ++i)
    if (t.v[i] == v) return i;
  return -1;
}

int Refiner::add_segment(int a, int b, int curve, double sa, double sb) {
  const int id = static_cast<int>(segs_.size());
  segs_.push_back({a, b, curve, sa, sb, true});
  seg_of_edge_[edge_key(a, b)] = id;
  return id;
}

void Refiner::remove_segment(int s) {
  segs_[s].alive = false;
  seg_of_edge_.erase(edge_key(segs_[s].a, segs_[s].b));
}

int Refiner::add_vertex(Vec2 p) {
  if (pts_.size() >= max_vertices_)
    throw MeshRefusal("mesh refinement exceeded the vertex budget", max_vertices_ * 2);
  pts_.push_back(p);
  vt_.push_back(-1);
  return static_cast<int>(pts_.size()) - 1;
}

int Refiner::locate(Vec2 p, int start, int* blocking_segment) {
  int t = start;
  const std::size_t limit = 4 * tris_.size() + 64;
  for (std::size_t step = 0; step < limit; ++step) {
    const Tri& T = tris_[t];
    const unsigned r = rand3();
    bool moved = false;
    for (unsigned k = 0; k < 3; ++k) {
      const int i = static_cast<int>((r + k) % 3u);
      const int a = T.v[(i + 1) % 3], b = T.v[(i + 2) % 3];
      if (orient(pts_[a], pts_[b], p) < 0.0L) {
        if (blocking_segment) {
          const int s = segment_at(a, b);
          if (s >= 0) {
            *blocking_segment = s;
            return t;
          }
        }
        if (T.n[i] < 0) throw std::runtime_error("point location left the triangulation");
        t = T.n[i];
        moved = true;
        break;
      }
    }
    if (!moved) return t;
  }
  throw std::runtime_error("point location did not terminate");
}

void Refiner::build_cavity(Vec2 p, int t0) {
  ++epoch_;
  cavity_.clear();
  cavity_.push_back(t0);
  mark_[t0] = epoch_;
  for (std::size_t k = 0; k < cavity_.size(); ++k) {
    const Tri& T = tris_[cavity_[k]];
    for (int i = 0; i < 3; ++i) {
      const int nb = T.n[i];
      if (nb < 0 || mark_[nb] == epoch_) continue;
      if (segment_at(T.v[(i + 1) % 3], T.v[(i + 2) % 3]) >= 0) continue;
      const Tri& N = tris_[nb];
      if (incircle(pts_[N.v[0]], pts_[N.v[1]], pts_[N.v[2]], p) > 0.0L) {
        mark_[nb] = epoch_;
        cavity_.push_back(nb);
      }
    }
  }

  // Repair until every boundary edge sees p strictly on its inner side.
  for (int round = 0;; ++round) {
    if (round > 1000) throw std::runtime_error("cavity repair did not converge");
    cavity_edges_.clear();
    bool changed = false;
    for (int t : cavity_) {
      if (mark_[t] != epoch_) continue;
      const Tri& T = tris_[t];
      for (int i = 0; i < 3; ++i) {
        const int nb = T.n[i];
        if (nb >= 0 && mark_[nb] == epoch_) continue;
        const int a = T.v[(i + 1) % 3], b = T.v[(i + 2) % 3];
        if (orient(pts_[a], pts_[b], p) > 0.0L) {
          int slot = -1;
          if (nb >= 0)
            for (int j = 0; j < 3; ++j)
              if (tris_[nb].n[j] == t) slot = j;
          cavity_edges_.push_back({a, b, nb, slot, t});
          continue;
        }
        changed = true;
        if (nb >= 0 && segment_at(a, b) < 0) {
          mark_[nb] = epoch_;
          cavity_.push_back(nb);
        } else if (t != t0) {
          mark_[t] = 0;
        } else {
          throw std::runtime_error("inserted point lies on a constrained edge or the hull");
        }
        break;
      }
      if (changed) break;
    }
    if (!changed) break;
    // keep only the part connected to t0
    std::vector<int> reach{t0};
    const unsigned keep = ++epoch_;
    const unsigned old = keep - 1;
    mark_[t0] = keep;
    for (std::size_t k = 0; k < reach.size(); ++k) {
      const Tri& T = tris_[reach[k]];
      for (int i = 0; i < 3; ++i) {
        const int nb = T.n[i];
        if (nb >= 0 && mark_[nb] == old) {
          mark_[nb] = keep;
          reach.push_back(nb);
        }
      }
    }
    cavity_.swap(reach);
  }
  if (cavity_edges_.size() != cavity_.size() + 2)
    throw std::runtime_error("cavity is not a topological disk");
}

int Refiner::commit(Vec2 p) {
  const int pv = add_vertex(p);
  for (int t : cavity_) {
    tris_[t].alive = false;
    mark_[t] = 0;
  }
  created_.clear();
  for (const auto& e : cavity_edges_) {
    // new triangle (a, b, pv); n[2] is across (a, b)
    const int id = new_tri(e.a, e.b, pv, tris_[e.owner].inside);
    tris_[id].n[2] = e.outside;
    if (e.outside >= 0) tris_[e.outside].n[e.outside_slot] = id;
    created_.push_back(id);
  }
  for (int t : cavity_) free_.push_back(t);
  // link around pv: edge (b, pv) of T matches edge (pv, a') of T' with a' == b
  if (starts_.size() < pts_.size()) starts_.resize(pts_.size(), -1);
  for (int t : created_) starts_[tris_[t].v[0]] = t;
  for (int t : created_) {
    Tri& T = tris_[t];
    const int next = starts_[T.v[1]];
    if (next < 0) throw std::runtime_error("cavity boundary is not a cycle");
    T.n[0] = next;
    tris_[next].n[1] = t;
  }
  for (int t : created_) starts_[tris_[t].v[0]] = -1;
  vt_[pv] = created_.front();
  hint_ = created_.front();
  return pv;
}

template <class F>
void Refiner::visit_fan(int v, F&& fn) const {
  const int start = vt_[v];
  int t = start;
  do {
    fn(t);
    const Tri& T = tris_[t];
    const int i = index_in(T, v);
    t = T.n[(i + 2) % 3];
    if (t < 0) throw std::runtime_error("open vertex fan");
  } while (t != start);
}

int Refiner::triangle_with_edge(int a, int b) const {
  int found = -1;
  visit_fan(a, [&](int t) {
    const Tri& T = tris_[t];
    const int i = index_in(T, a);
    if (T.v[(i + 1) % 3] == b) found = t;
  });
  return found;
}

int Refiner::split_segment(int s) {
  const Seg sg = segs_[s];
  const double sm = 0.5 * (sg.sa + sg.sb);
  const BoundaryCurve& curve = pslg_.curves[sg.curve];
  const Vec2 p = curve.at(sm);
  const Vec2 pa = pts_[sg.a], pb = pts_[sg.b];
  const double len = norm(pb - pa);
  const double scale = std::max({std::abs(pa.x), std::abs(pa.y), 1e-300});
  if (len < 1e-13 * scale || !(norm(p - pa) > 0.0) || !(norm(p - pb) > 0.0))
    throw std::runtime_error("boundary segment became too short to split");
  remove_segment(s);
  const int t0 = locate(p, vt_[sg.a], nullptr);
  const int pv = insert(p, t0);
  add_segment(sg.a, pv, sg.curve, sg.sa, sm);
  add_segment(pv, sg.b, sg.curve, sm, sg.sb);
  if (labeled_) relabel_fan(pv, sg.a, sg.b);
  return pv;
}

void Refiner::relabel_fan(int pv, int a, int b) {
  if (triangle_with_edge(a, pv) < 0 && triangle_with_edge(pv, a) < 0)
    throw std::runtime_error("split did not produce the first subsegment");
  if (triangle_with_edge(pv, b) < 0 && triangle_with_edge(b, pv) < 0)
    throw std::runtime_error("split did not produce the second subsegment");
  const Vec2 c = pts_[pv];
  const Vec2 u = pts_[b] - c;  // the domain sector runs counterclockwise from u to w
  const Vec2 w = pts_[a] - c;
  const bool convex = cross(u, w) >= 0.0;
  for (int t : created_) {
    Tri& T = tris_[t];
    const Vec2 g{(pts_[T.v[0]].x + pts_[T.v[1]].x + pts_[T.v[2]].x) / 3.0 - c.x,
                 (pts_[T.v[0]].y + pts_[T.v[1]].y + pts_[T.v[2]].y) / 3.0 - c.y};
    const bool after_u = cross(u, g) > 0.0;
    const bool before_w = cross(g, w) > 0.0;
    T.inside = convex ? (after_u && before_w) : (after_u || before_w);
  }
}

void Refiner::classify() {
  std::vector<signed char> label(tris_.size(), -1);
  std::vector<int> stack;
  auto seed = [&](int t, signed char value) {
    if (t < 0) return;
    if (label[t] >= 0 && label[t] != value)
      throw std::runtime_error("boundary loops are inconsistently oriented");
    if (label[t] < 0) {
      label[t] = value;
      stack.push_back(t);
    }
  };
  for (const auto& s : segs_) {
    if (!s.alive) continue;
    seed(triangle_with_edge(s.a, s.b), 1);
    seed(triangle_with_edge(s.b, s.a), 0);
  }
  while (!stack.empty()) {
    const int t = stack.back();
    stack.pop_back();
    const Tri& T = tris_[t];
    for (int i = 0; i < 3; ++i) {
      const int nb = T.n[i];
      if (nb < 0 || segment_at(T.v[(i + 1) % 3], T.v[(i + 2) % 3]) >= 0) continue;
      if (label[nb] >= 0) {
        if (label[nb] != label[t])
          throw std::runtime_error("domain is not separated by its boundary");
        continue;
      }
      label[nb] = label[t];
      stack.push_back(nb);
    }
  }
  for (std::size_t t = 0; t < tris_.size(); ++t)
    if (tris_[t].alive) tris_[t].inside = label[t] == 1;
  labeled_ = true;
}

bool Refiner::is_bad(int t) const {
  const Tri& T = tris_[t];
  const Vec2 a = pts_[T.v[0]], b = pts_[T.v[1]], c = pts_[T.v[2]];
  const double la = norm(b - c), lb = norm(c - a), lc = norm(a - b);
  const double area2 = static_cast<double>(orient(a, b, c));
  if (!(area2 > 0.0)) return true;
  const double rc = la * lb * lc / (2.0 * area2);
  const double lmin = std::min({la, lb, lc});
  if (rc > std::sqrt(2.0) * lmin) return true;
  const Vec2 g{(a.x + b.x + c.x) / 3.0, (a.y + b.y + c.y) / 3.0};
  return 2.0 * rc > size_(g);
}

void Refiner::queue_segment_check(int s) {
  const Seg& sg = segs_[s];
  if (!sg.alive) return;
  const int t = triangle_with_edge(sg.a, sg.b);
  if (t < 0) return;
  const Tri& T = tris_[t];
  const int i = index_in(T, sg.a);
  const int apex = T.v[(i + 2) % 3];
  if (encroaches(pts_[sg.a], pts_[sg.b], pts_[apex])) seg_queue_.push_back(s);
}

void Refiner::queue_fan(int pv) {
  for (int t : created_) {
    const Tri& T = tris_[t];
    if (T.inside) bad_queue_.push_back(t);
    // edge opposite pv
    const int s = segment_at(T.v[0], T.v[1]);
    if (s >= 0 && T.inside && encroaches(pts_[T.v[0]], pts_[T.v[1]], pts_[pv]))
      seg_queue_.push_back(s);
  }
}

void Refiner::refine_all() {
  for (std::size_t s = 0; s < segs_.size(); ++s) queue_segment_check(static_cast<int>(s));
  for (std::size_t t = 0; t < tris_.size(); ++t)
    if (tris_[t].alive && tris_[t].inside) bad_queue_.push_back(static_cast<int>(t));

  std::vector<int> stamp;  // triangle vertices at queue time are re-checked on pop
  while (!seg_queue_.empty() || !bad_queue_.empty()) {
    if (!seg_queue_.empty()) {
      const int s = seg_queue_.front();
      seg_queue_.pop_front();
      if (!segs_[s].alive) continue;
      const int pv = split_segment(s);
      queue_fan(pv);
      queue_segment_check(static_cast<int>(segs_.size()) - 2);
      queue_segment_check(static_cast<int>(segs_.size()) - 1);
      continue;
    }
    const int t = bad_queue_.front();
    bad_queue_.pop_front();
    if (!tris_[t].alive || !tris_[t].inside || !is_bad(t)) continue;
    const Tri& T = tris_[t];
    const Vec2 c = circumcenter(pts_[T.v[0]], pts_[T.v[1]], pts_[T.v[2]]);
    int blocking = -1;
    const int host = locate(c, t, &blocking);
    if (blocking >= 0) {
      seg_queue_.push_back(blocking);
      bad_queue_.push_back(t);
      continue;
    }
    build_cavity(c, host);
    bool encroached = false;
    for (const auto& e : cavity_edges_) {
      const int s = segment_at(e.a, e.b);
      if (s >= 0 && encroaches(pts_[e.a], pts_[e.b], c)) {
        seg_queue_.push_back(s);
        encroached = true;
      }
    }
    if (encroached) {
      for (int k : cavity_) mark_[k] = 0;
      bad_queue_.push_back(t);
      continue;
    }
    const int pv = commit(c);
    queue_fan(pv);
  }
}

RefineResult Refiner::run() {
  // bounding box and enclosing triangle
  double x0 = std::numeric_limits<double>::infinity(), y0 = x0, x1 = -x0, y1 = -x0;
  for (const auto& p : pslg_.vertices) {
    x0 = std::min(x0, p.x);
    y0 = std::min(y0, p.y);
    x1 = std::max(x1, p.x);
    y1 = std::max(y1, p.y);
  }
  const double cx = 0.5 * (x0 + x1), cy = 0.5 * (y0 + y1);
  const double span = std::max({x1 - x0, y1 - y0, 1e-3});
  add_vertex({cx - 20.0 * span, cy - 20.0 * span});
  add_vertex({cx + 20.0 * span, cy - 20.0 * span});
  add_vertex({cx, cy + 20.0 * span});
  hint_ = new_tri(0, 1, 2, false);
  constexpr int kSuper = 3;

  for (const auto& h : pslg_.holes) insert(h, locate(h, hint_, nullptr));
  // Biased randomized insertion order: random rounds of doubling size, each
  // sorted along a Hilbert curve. Keeps both cavities and walks short.
  const std::size_t nv = pslg_.vertices.size();
  std::vector<std::size_t> order(nv);
  for (std::size_t i = 0; i < nv; ++i) order[i] = i;
  std::uint64_t state = 0x9E3779B97F4A7C15ull;
  for (std::size_t i = nv; i > 1; --i) {
    state = state * 6364136223846793005ull + 1442695040888963407ull;
    std::swap(order[i - 1], order[(state >> 33) % i]);
  }
  std::vector<std::uint64_t> hkey(nv);
  for (std::size_t i = 0; i < nv; ++i) {
    const Vec2 p = pslg_.vertices[i];
    hkey[i] = hilbert_index((p.x - x0) / span, (p.y - y0) / span);
  }
  for (std::size_t lo = 0, len = 64; lo < nv; lo += len, len *= 2) {
    const std::size_t hi = std::min(nv, lo + len);
    std::sort(order.begin() + lo, order.begin() + hi,
              [&](std::size_t a, std::size_t b) { return hkey[a] < hkey[b] || (hkey[a] == hkey[b] && a < b); });
  }
  std::vector<int> vid(nv);
  for (std::size_t i : order) {
    const Vec2 p = pslg_.vertices[i];
    vid[i] = insert(p, locate(p, hint_, nullptr));
  }

  // recover segments by midpoint splitting
  std::deque<int> pending;
  for (const auto& s : pslg_.segments) {
    pending.push_back(add_segment(vid[s.a], vid[s.b], s.curve, s.sa, s.sb));
  }
  // segments are registered before recovery so insertions never cut them
  while (!pending.empty()) {
    const int s = pending.front();
    pending.pop_front();
    if (!segs_[s].alive) continue;
    if (triangle_with_edge(segs_[s].a, segs_[s].b) >= 0 ||
        triangle_with_edge(segs_[s].b, segs_[s].a) >= 0)
      continue;
    split_segment(s);
    pending.push_back(static_cast<int>(segs_.size()) - 2);
    pending.push_back(static_cast<int>(segs_.size()) - 1);
  }

  classify();
  refine_all();

  RefineResult out;
  std::vector<int> node_map(pts_.size(), -1);
  for (const auto& T : tris_) {
    if (!T.alive || !T.inside) continue;
    for (int v : T.v) {
      if (v < kSuper) throw std::runtime_error("domain touches the enclosing triangle");
      node_map[v] = 0;
    }
  }
  int next = 0;
  for (std::size_t v = 0; v < pts_.size(); ++v) {
    if (node_map[v] < 0) continue;
    node_map[v] = next++;
    out.mesh.nodes.push_back(pts_[v]);
  }
  for (const auto& T : tris_) {
    if (!T.alive || !T.inside) continue;
    out.mesh.triangles.push_back({node_map[T.v[0]], node_map[T.v[1]], node_map[T.v[2]]});
  }
  for (const auto& s : segs_) {
    if (!s.alive) continue;
    const int a = node_map[s.a], b = node_map[s.b];
    if (a < 0 || b < 0) throw std::runtime_error("boundary segment without adjacent elements");
    const BoundaryCurve& c = pslg_.curves[s.curve];
    if (c.internal) {
      out.internal_edge_nodes.push_back(a);
      out.internal_edge_nodes.push_back(b);
    } else {
      out.mesh.boundaryEdges.push_back({a, b, c.tag});
    }
  }
  return out;
}

}  // namespace

RefineResult refine(const Pslg& pslg, const SizeField& size, std::size_t max_vertices) {
  Refiner r(pslg, size, max_vertices);
  return r.run();
}

}  // namespace neckfield::detail
