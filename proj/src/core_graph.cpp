#include "cogrowth/core_graph.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <deque>
#include <numeric>
#include <sstream>
#include <utility>

#include "cogrowth/errors.hpp"

namespace cogrowth {

namespace {

// Union-find folding of a labelled graph. Edge insertions and vertex merges
// go through one work list so that folding cascades without recursion.
class Folder {
 public:
  Folder(FreeGroupRank rank, int vertices)
      : slots_(rank.letters()), parent_(static_cast<std::size_t>(vertices)),
        adj_(static_cast<std::size_t>(vertices) * static_cast<std::size_t>(slots_), -1) {
    std::iota(parent_.begin(), parent_.end(), 0);
  }

  int add_vertex() {
    parent_.push_back(static_cast<int>(parent_.size()));
    adj_.resize(adj_.size() + static_cast<std::size_t>(slots_), -1);
    return static_cast<int>(parent_.size()) - 1;
  }

  int find(int x) {
    while (parent_[static_cast<std::size_t>(x)] != x) {
      parent_[static_cast<std::size_t>(x)] =
          parent_[static_cast<std::size_t>(parent_[static_cast<std::size_t>(x)])];
      x = parent_[static_cast<std::size_t>(x)];
    }
    return x;
  }

  int& slot(int v, int li) {
    return adj_[static_cast<std::size_t>(v) * static_cast<std::size_t>(slots_) +
                static_cast<std::size_t>(li)];
  }

  void add_edge(int u, int li, int v) {
    work_.push_back({false, u, li, v});
    drain();
  }

  /// Follows the edge from the representative of v, or -1.
  int step(int v, int li) {
    v = find(v);
    const int t = slot(v, li);
    return t < 0 ? -1 : find(t);
  }

  int size() const { return static_cast<int>(parent_.size()); }
  int slots() const { return slots_; }

 private:
  struct Op {
    bool merge;
    int a, li, b;
  };

  void drain() {
    while (!work_.empty()) {
      const Op op = work_.front();
      work_.pop_front();
      if (op.merge) {
        const int x = find(op.a);
        const int y = find(op.b);
        if (x == y) continue;
        parent_[static_cast<std::size_t>(y)] = x;
        for (int li = 0; li < slots_; ++li) {
          const int t = slot(y, li);
          if (t >= 0) {
            slot(y, li) = -1;
            work_.push_back({false, x, li, t});
          }
        }
      } else {
        const int u = find(op.a);
        const int v = find(op.b);
        const int li = op.li;
        const int ii = li ^ 1;
        int& fwd = slot(u, li);
        if (fwd < 0) {
          fwd = v;
        } else if (const int t = find(fwd); t != v) {
          work_.push_back({true, t, 0, v});
        }
        // u may have been merged by the push above only lazily; re-find.
        int& back = slot(find(v), ii);
        if (back < 0) {
          back = find(u);
        } else if (const int t = find(back); t != find(u)) {
          work_.push_back({true, t, 0, find(u)});
        }
      }
    }
  }

  int slots_;
  std::vector<int> parent_;
  std::vector<int> adj_;
  std::deque<Op> work_;
};

// Extracts the folded graph, trims hanging trees (keeping the basepoint) and
// renumbers vertices by BFS from the basepoint.
std::pair<int, std::vector<int>> finish(Folder& f, int basepoint) {
  const int n = f.size();
  const int s = f.slots();
  const int base = f.find(basepoint);

  std::vector<int> out(static_cast<std::size_t>(n) * static_cast<std::size_t>(s), -1);
  for (int v = 0; v < n; ++v) {
    if (f.find(v) != v) continue;
    for (int li = 0; li < s; ++li) {
      out[static_cast<std::size_t>(v * s + li)] = f.step(v, li);
    }
  }
  auto at = [&](int v, int li) -> int& { return out[static_cast<std::size_t>(v * s + li)]; };

  std::vector<int> degree(static_cast<std::size_t>(n), 0);
  std::vector<char> alive(static_cast<std::size_t>(n), 0);
  for (int v = 0; v < n; ++v) {
    if (f.find(v) != v) continue;
    alive[static_cast<std::size_t>(v)] = 1;
    for (int li = 0; li < s; ++li) degree[static_cast<std::size_t>(v)] += at(v, li) >= 0;
  }
  std::vector<int> stack;
  for (int v = 0; v < n; ++v) {
    if (alive[static_cast<std::size_t>(v)] && v != base && degree[static_cast<std::size_t>(v)] <= 1) {
      stack.push_back(v);
    }
  }
  while (!stack.empty()) {
    const int v = stack.back();
    stack.pop_back();
    if (!alive[static_cast<std::size_t>(v)]) continue;
    alive[static_cast<std::size_t>(v)] = 0;
    for (int li = 0; li < s; ++li) {
      const int t = at(v, li);
      if (t < 0) continue;
      at(v, li) = -1;
      if (t == v) continue;
      at(t, li ^ 1) = -1;
      if (--degree[static_cast<std::size_t>(t)] <= 1 && t != base) stack.push_back(t);
    }
  }

  std::vector<int> label(static_cast<std::size_t>(n), -1);
  std::vector<int> order;
  label[static_cast<std::size_t>(base)] = 0;
  order.push_back(base);
  for (std::size_t head = 0; head < order.size(); ++head) {
    const int v = order[head];
    for (int li = 0; li < s; ++li) {
      const int t = at(v, li);
      if (t >= 0 && label[static_cast<std::size_t>(t)] < 0) {
        label[static_cast<std::size_t>(t)] = static_cast<int>(order.size());
        order.push_back(t);
      }
    }
  }
  const int m = static_cast<int>(order.size());
  std::vector<int> canon(static_cast<std::size_t>(m) * static_cast<std::size_t>(s), -1);
  for (int i = 0; i < m; ++i) {
    for (int li = 0; li < s; ++li) {
      const int t = at(order[static_cast<std::size_t>(i)], li);
      if (t >= 0) canon[static_cast<std::size_t>(i * s + li)] = label[static_cast<std::size_t>(t)];
    }
  }
  return {m, std::move(canon)};
}

void add_word_path(Folder& f, int from, std::span<const Letter> letters, int to) {
  int cur = from;
  for (std::size_t i = 0; i < letters.size(); ++i) {
    const int li = letter_index(letters[i]);
    const int next = (i + 1 == letters.size()) ? to : f.add_vertex();
    f.add_edge(cur, li, next);
    cur = next;
  }
}

}  // namespace

CoreGraph::CoreGraph(FreeGroupRank rank)
    : rank_(rank), vertices_(1), slots_(rank.letters()),
      out_(static_cast<std::size_t>(rank.letters()), kNoEdge) {}

CoreGraph::CoreGraph(FreeGroupRank rank, int vertices, std::vector<int> out)
    : rank_(rank), vertices_(vertices), slots_(rank.letters()), out_(std::move(out)) {}

CoreGraph CoreGraph::fold(FreeGroupRank rank, std::span<const Word> generators) {
  Folder f(rank, 1);
  for (const Word& g : generators) {
    if (g.rank() != rank) throw PreconditionError("generator rank mismatch in fold");
    if (g.is_identity()) continue;
    add_word_path(f, 0, g.letters(), 0);
  }
  auto [m, out] = finish(f, 0);
  return CoreGraph(rank, m, std::move(out));
}

CoreGraph CoreGraph::from_edges(FreeGroupRank rank, int vertices, int basepoint,
                                std::span<const RawEdge> edges) {
  if (vertices < 1 || basepoint < 0 || basepoint >= vertices) {
    throw PreconditionError("core graph needs at least one vertex and a valid basepoint");
  }
  Folder f(rank, vertices);
  for (const RawEdge& e : edges) {
    if (e.from < 0 || e.from >= vertices || e.to < 0 || e.to >= vertices) {
      throw PreconditionError("edge endpoint out of range");
    }
    if (e.label == 0 || e.label > rank.k() || e.label < -rank.k()) {
      throw PreconditionError("edge label outside alphabet");
    }
    f.add_edge(e.from, letter_index(e.label), e.to);
  }
  // Disconnected pieces are dropped by the BFS renumbering in finish().
  auto [m, out] = finish(f, basepoint);
  return CoreGraph(rank, m, std::move(out));
}

int CoreGraph::degree(int v) const noexcept {
  int d = 0;
  for (int li = 0; li < slots_; ++li) d += target(v, li) != kNoEdge;
  return d;
}

int CoreGraph::edge_count() const noexcept {
  int e = 0;
  for (int v = 0; v < vertices_; ++v) {
    for (int li = 0; li < slots_; li += 2) e += target(v, li) != kNoEdge;
  }
  return e;
}

int CoreGraph::read_from(int v, std::span<const Letter> letters) const noexcept {
  for (Letter x : letters) {
    v = target(v, letter_index(x));
    if (v == kNoEdge) return kNoEdge;
  }
  return v;
}

bool CoreGraph::is_complete() const noexcept {
  for (int v = 0; v < vertices_; ++v) {
    if (degree(v) != slots_) return false;
  }
  return true;
}

Word CoreGraph::path_to(int v) const {
  // BFS tree in canonical order: parent is the first discoverer.
  std::vector<int> parent(static_cast<std::size_t>(vertices_), -1);
  std::vector<int> via(static_cast<std::size_t>(vertices_), -1);
  std::vector<int> order{0};
  parent[0] = 0;
  for (std::size_t head = 0; head < order.size(); ++head) {
    const int u = order[head];
    for (int li = 0; li < slots_; ++li) {
      const int t = target(u, li);
      if (t != kNoEdge && parent[static_cast<std::size_t>(t)] < 0) {
        parent[static_cast<std::size_t>(t)] = u;
        via[static_cast<std::size_t>(t)] = li;
        order.push_back(t);
      }
    }
  }
  std::vector<Letter> rev;
  for (int u = v; u != 0; u = parent[static_cast<std::size_t>(u)]) {
    rev.push_back(letter_from_index(via[static_cast<std::size_t>(u)]));
  }
  Word w(rank_);
  for (auto it = rev.rbegin(); it != rev.rend(); ++it) w.push_reduced(*it);
  return w;
}

std::vector<Word> CoreGraph::basis() const {
  std::vector<Word> paths;
  paths.reserve(static_cast<std::size_t>(vertices_));
  for (int v = 0; v < vertices_; ++v) paths.push_back(path_to(v));
  auto is_tree_edge = [&](int u, int li, int t) {
    const Word& pu = paths[static_cast<std::size_t>(u)];
    const Word& pt = paths[static_cast<std::size_t>(t)];
    const Letter x = letter_from_index(li);
    if (pt.length() == pu.length() + 1 && pt.back() == x) {
      return std::equal(pu.letters().begin(), pu.letters().end(), pt.letters().begin());
    }
    if (pu.length() == pt.length() + 1 && pu.back() == -x) {
      return std::equal(pt.letters().begin(), pt.letters().end(), pu.letters().begin());
    }
    return false;
  };
  std::vector<Word> out;
  for (int u = 0; u < vertices_; ++u) {
    for (int li = 0; li < slots_; li += 2) {
      const int t = target(u, li);
      if (t == kNoEdge || is_tree_edge(u, li, t)) continue;
      Word w = paths[static_cast<std::size_t>(u)];
      w.push_reduced(letter_from_index(li));
      out.push_back(mul(w, paths[static_cast<std::size_t>(t)].inverse()));
    }
  }
  return out;
}

bool membership(const CoreGraph& h, const Word& g) {
  if (g.rank() != h.rank()) throw PreconditionError("membership: rank mismatch");
  return h.read(g) == h.basepoint();
}

CoreGraph conjugate_subgroup(const CoreGraph& h, const Word& g) {
  if (g.rank() != h.rank()) throw PreconditionError("conjugate_subgroup: rank mismatch");
  const int slots = h.rank().letters();
  Folder f(h.rank(), h.vertex_count());
  for (int v = 0; v < h.vertex_count(); ++v) {
    for (int li = 0; li < slots; li += 2) {
      const int t = h.target(v, li);
      if (t != CoreGraph::kNoEdge) f.add_edge(v, li, t);
    }
  }
  // Reading g from the old basepoint lands on the new one: x is a loop there
  // iff g x g^-1 is a loop at the old basepoint.
  int cur = 0;
  for (Letter x : g.letters()) {
    const int li = letter_index(x);
    int next = f.step(cur, li);
    if (next < 0) {
      next = f.add_vertex();
      f.add_edge(cur, li, next);
    }
    cur = next;
  }
  auto [m, out] = finish(f, cur);
  return CoreGraph(h.rank(), m, std::move(out));
}

std::string serialize(const CoreGraph& h) {
  std::ostringstream os;
  os << "rank " << h.rank().k() << "\n";
  os << "vertices " << h.vertex_count() << "\n";
  os << "basepoint 0\n";
  for (int v = 0; v < h.vertex_count(); ++v) {
    for (int li = 0; li < h.rank().letters(); li += 2) {
      const int t = h.target(v, li);
      if (t != CoreGraph::kNoEdge) os << v << " " << (li / 2 + 1) << " " << t << "\n";
    }
  }
  return os.str();
}

CoreGraph parse_core_graph(std::string_view text) {
  std::istringstream is{std::string(text)};
  std::string line;
  int k = -1;
  int n = -1;
  int base = -1;
  std::vector<CoreGraph::RawEdge> edges;
  int line_no = 0;
  while (std::getline(is, line)) {
    ++line_no;
    if (const auto hash = line.find('#'); hash != std::string::npos) line.erase(hash);
    std::istringstream ls(line);
    std::string head;
    if (!(ls >> head)) continue;
    auto fail = [&](const std::string& msg) {
      throw PreconditionError("core graph line " + std::to_string(line_no) + ": " + msg);
    };
    if (head == "rank") {
      if (!(ls >> k)) fail("expected `rank k`");
    } else if (head == "vertices") {
      if (!(ls >> n)) fail("expected `vertices n`");
    } else if (head == "basepoint") {
      if (!(ls >> base)) fail("expected `basepoint v`");
    } else {
      int from = 0;
      int gen = 0;
      int to = 0;
      try {
        from = std::stoi(head);
      } catch (const std::exception&) {
        fail("unexpected token `" + head + "`");
      }
      if (!(ls >> gen >> to)) fail("expected `from gen to`");
      if (k < 0 || gen < 1 || gen > k) fail("generator index out of range");
      edges.push_back({from, static_cast<Letter>(gen), to});
    }
  }
  if (k < 0 || n < 0 || base < 0) {
    throw PreconditionError("core graph file needs `rank`, `vertices` and `basepoint` headers");
  }
  return CoreGraph::from_edges(FreeGroupRank(k), n, base, edges);
}

}  // namespace cogrowth

namespace cogrowth {

std::vector<double> log_loop_counts(const CoreGraph& h, std::size_t n_max) {
  const int letters = h.rank().letters();
  const auto states = static_cast<std::size_t>(h.vertex_count() * letters);
  // cur[v * letters + li]: weight of reduced paths from the basepoint ending at v
  // with last letter li; `scale` is the log of the common factor taken out.
  std::vector<double> cur(states, 0.0);
  std::vector<double> next(states, 0.0);
  std::vector<double> out(n_max + 1, -std::numeric_limits<double>::infinity());
  out[0] = 0.0;
  double scale = 0.0;
  for (std::size_t n = 1; n <= n_max; ++n) {
    std::fill(next.begin(), next.end(), 0.0);
    if (n == 1) {
      for (int li = 0; li < letters; ++li) {
        const int t = h.target(0, li);
        if (t != CoreGraph::kNoEdge) next[static_cast<std::size_t>(t * letters + li)] += 1.0;
      }
    } else {
      for (int v = 0; v < h.vertex_count(); ++v) {
        for (int last = 0; last < letters; ++last) {
          const double w = cur[static_cast<std::size_t>(v * letters + last)];
          if (w == 0.0) continue;
          for (int li = 0; li < letters; ++li) {
            if (li == (last ^ 1)) continue;
            const int t = h.target(v, li);
            if (t != CoreGraph::kNoEdge) next[static_cast<std::size_t>(t * letters + li)] += w;
          }
        }
      }
    }
    double total = 0.0;
    double closed = 0.0;
    for (std::size_t s = 0; s < states; ++s) total += next[s];
    for (int li = 0; li < letters; ++li) closed += next[static_cast<std::size_t>(li)];
    if (total == 0.0) break;
    if (closed > 0.0) out[n] = scale + std::log(closed);
    for (double& x : next) x /= total;
    scale += std::log(total);
    std::swap(cur, next);
  }
  return out;
}

}  // namespace cogrowth
