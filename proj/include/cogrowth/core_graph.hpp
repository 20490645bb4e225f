#pragma once

// Stallings core graphs of finitely generated subgroups H <= F_k.
//
// A CoreGraph is a folded (deterministic) labelled graph with a basepoint.
// Vertices are numbered canonically by breadth-first search from the basepoint
// (basepoint = 0, neighbours visited in letter_index order), so two graphs
// describe the same subgroup iff they compare equal.

#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "cogrowth/word.hpp"

namespace cogrowth {

class CoreGraph {
 public:
  static constexpr int kNoEdge = -1;

  /// Trivial subgroup: one vertex, no edges.
  explicit CoreGraph(FreeGroupRank rank);

  /// Stallings fold of the bouquet of generator petals, trimmed to the core.
  /// An empty list yields the trivial subgroup.
  static CoreGraph fold(FreeGroupRank rank, std::span<const Word> generators);

  /// Builds from raw labelled edges (from, signed letter, to), then folds and
  /// trims keeping `basepoint`.
  struct RawEdge {
    int from;
    Letter label;
    int to;
  };
  static CoreGraph from_edges(FreeGroupRank rank, int vertices, int basepoint,
                              std::span<const RawEdge> edges);

  FreeGroupRank rank() const noexcept { return rank_; }
  int vertex_count() const noexcept { return vertices_; }
  int basepoint() const noexcept { return 0; }
  /// Target of the edge leaving v with letter_index li, or kNoEdge.
  int target(int v, int li) const noexcept { return out_[static_cast<std::size_t>(v * slots_ + li)]; }
  int degree(int v) const noexcept;
  /// Number of undirected (positive-letter) edges.
  int edge_count() const noexcept;

  /// Vertex reached by reading w from the basepoint, or kNoEdge.
  int read(const Word& w) const noexcept { return read_from(0, w.letters()); }
  int read_from(int v, std::span<const Letter> letters) const noexcept;

  bool is_trivial() const noexcept { return edge_count() == 0; }
  /// Every vertex has all 2k edges: H has finite index = vertex_count().
  bool is_complete() const noexcept;

  /// A free basis of H read off a BFS spanning tree (one word per non-tree edge).
  std::vector<Word> basis() const;
  /// Label of the canonical BFS tree path from the basepoint to v.
  Word path_to(int v) const;

  bool operator==(const CoreGraph& other) const noexcept {
    return rank_ == other.rank_ && vertices_ == other.vertices_ && out_ == other.out_;
  }

 private:
  friend CoreGraph conjugate_subgroup(const CoreGraph& h, const Word& g);

  CoreGraph(FreeGroupRank rank, int vertices, std::vector<int> out);

  FreeGroupRank rank_;
  int vertices_;
  int slots_;
  std::vector<int> out_;
};

/// h in H iff reading h from the basepoint returns to the basepoint.
bool membership(const CoreGraph& h, const Word& g);

/// Core graph of H^g = g^-1 H g.
CoreGraph conjugate_subgroup(const CoreGraph& h, const Word& g);

/// Tracks the vertex reached by reading a reduced word from the basepoint as
/// letters are pushed and popped; once the word leaves the graph the depth
/// beyond the last vertex is counted instead.
class ReadTracker {
 public:
  explicit ReadTracker(const CoreGraph& h) : h_(&h), stack_{0} {}
  void push(Letter x) {
    if (off_ > 0) {
      ++off_;
      return;
    }
    const int t = h_->target(stack_.back(), letter_index(x));
    if (t == CoreGraph::kNoEdge) {
      off_ = 1;
    } else {
      stack_.push_back(t);
    }
  }
  void pop() {
    if (off_ > 0) {
      --off_;
    } else {
      stack_.pop_back();
    }
  }
  bool on_graph() const noexcept { return off_ == 0; }
  bool at_basepoint() const noexcept { return off_ == 0 && stack_.back() == 0; }
  int vertex() const noexcept { return off_ == 0 ? stack_.back() : CoreGraph::kNoEdge; }
  /// Last vertex on the graph and the number of letters read past it.
  int last_vertex() const noexcept { return stack_.back(); }
  std::size_t off_depth() const noexcept { return off_; }

 private:
  const CoreGraph* h_;
  std::vector<int> stack_;
  std::size_t off_ = 0;
};

/// log of the number of elements of H of word length exactly n, n = 0..n_max
/// (reduced loops at the basepoint); -inf where there are none.
std::vector<double> log_loop_counts(const CoreGraph& h, std::size_t n_max);

/// Text format: `rank k`, `vertices n`, `basepoint 0`, then `from gen to` lines
/// with gen in 1..k. Parsing re-folds and re-cores.
std::string serialize(const CoreGraph& h);
CoreGraph parse_core_graph(std::string_view text);

}  // namespace cogrowth
