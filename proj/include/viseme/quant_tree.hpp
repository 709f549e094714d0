#pragma once

#include <cstdint>
#include <map>
#include <optional>
#include <span>
#include <vector>

namespace viseme {

// Binary tree over the regularly decomposed unit hypercube [0, 1)^k at r
// bits per coordinate. Level l halves coordinate l mod k; a cell code is the
// k*r-bit address of the descent, most significant bit first.
class QuantTree {
public:
    enum class Kind : std::uint8_t { Internal = 0, White = 1, Black = 2 };

    static constexpr std::uint32_t kNoLabel = 0xffffffffu;

    QuantTree() : QuantTree(1, 1) {}
    QuantTree(int k, int r);

    int dimension() const { return k_; }
    int precision() const { return r_; }
    int depth() const { return k_ * r_; }

    std::uint64_t cell_code(std::span<const double> v) const;
    // Per-coordinate r-bit cell indices of a code.
    std::vector<std::uint32_t> cell_coords(std::uint64_t code) const;
    std::uint64_t code_from_coords(std::span<const std::uint32_t> coords) const;

    std::uint64_t insert(std::span<const double> v, std::uint32_t label = kNoLabel);
    void insert_code(std::uint64_t code, std::uint32_t label = kNoLabel);

    bool contains(std::span<const double> v) const { return contains_code(cell_code(v)); }
    bool contains_code(std::uint64_t code) const;
    bool empty() const { return nodes_[0].kind == Kind::White; }

    // Every full-depth cell covered by a BLACK node, ascending.
    std::vector<std::uint64_t> occupied_cells() const;

    struct Nearest {
        std::uint64_t code = 0;
        double distance = 1.0;
        int rounds = 0;  // completed halving rounds shared with the query
    };
    Nearest nearest(std::span<const double> v, int r_query) const;

    std::uint64_t count(std::uint64_t code) const;
    const std::map<std::uint64_t, std::uint64_t>& counts() const { return counts_; }
    const std::map<std::uint64_t, std::map<std::uint32_t, std::uint64_t>>& labels() const { return labels_; }

    Kind root_kind() const { return nodes_[0].kind; }
    std::size_t node_count() const;  // reachable nodes
    std::size_t black_leaf_count() const;

    // "VQT1", k, r (u32 each), symbol count (u32), packed 2-bit preorder
    // stream, then (code u64, label u32, count u64) rows; kNoLabel rows hold
    // plain occurrence counts.
    std::vector<std::uint8_t> serialize() const;
    static QuantTree deserialize(std::span<const std::uint8_t> bytes);

    bool operator==(const QuantTree& o) const;

private:
    struct Node {
        Kind kind = Kind::White;
        std::int32_t child[2] = {-1, -1};
    };

    int bit_at(std::uint64_t code, int level) const { return static_cast<int>((code >> (depth() - 1 - level)) & 1u); }
    std::int32_t new_node(Kind kind);
    bool label_sets_equal(std::int32_t a, std::uint64_t prefix_a, std::int32_t b, std::uint64_t prefix_b,
                          int level) const;
    std::vector<std::uint32_t> subtree_labels(std::uint64_t prefix, int level) const;
    void collect(std::int32_t n, std::uint64_t prefix, int level, std::vector<std::uint64_t>& out) const;
    std::uint64_t leftmost_black(std::int32_t n, std::uint64_t prefix, int level) const;

    int k_, r_;
    std::vector<Node> nodes_;
    std::vector<std::int32_t> free_;
    std::map<std::uint64_t, std::uint64_t> counts_;
    std::map<std::uint64_t, std::map<std::uint32_t, std::uint64_t>> labels_;
};

// Side length of the smallest dyadic cell of the coordinate-cycling scheme
// holding both vectors: 2^-q with q the completed shared halving rounds.
double hausdorff_distance(std::span<const double> u, std::span<const double> v, int r);

// k-D Hilbert order of the occupied cells.
std::vector<std::uint64_t> self_sort(const QuantTree& tree);

}  // namespace viseme
