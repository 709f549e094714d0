#include "viseme/quant_tree.hpp"

#include <algorithm>
#include <cmath>
#include <cstring>
#include <functional>
#include <stdexcept>

#include "viseme/hilbert.hpp"
#include "viseme/image.hpp"

namespace viseme {

QuantTree::QuantTree(int k, int r) : k_(k), r_(r) {
    if (k < 1 || r < 1 || k * r > 63) throw std::invalid_argument("quantization tree needs k, r >= 1 and k*r <= 63");
    nodes_.push_back({});
}

std::uint64_t QuantTree::cell_code(std::span<const double> v) const {
    if (static_cast<int>(v.size()) != k_) throw std::invalid_argument("vector dimension mismatch");
    std::vector<std::uint32_t> q(k_);
    const double scale = std::ldexp(1.0, r_);
    for (int d = 0; d < k_; ++d) {
        if (!std::isfinite(v[d]) || v[d] < 0.0 || v[d] >= 1.0)
            throw std::domain_error("normalized coordinate outside [0, 1)");
        q[d] = std::min(static_cast<std::uint32_t>(v[d] * scale), (1u << r_) - 1);
    }
    return code_from_coords(q);
}

std::uint64_t QuantTree::code_from_coords(std::span<const std::uint32_t> q) const {
    std::uint64_t code = 0;
    for (int level = 0; level < depth(); ++level) {
        const int d = level % k_, j = level / k_;
        code = (code << 1) | ((q[d] >> (r_ - 1 - j)) & 1u);
    }
    return code;
}

std::vector<std::uint32_t> QuantTree::cell_coords(std::uint64_t code) const {
    std::vector<std::uint32_t> q(k_, 0);
    for (int level = 0; level < depth(); ++level) q[level % k_] = (q[level % k_] << 1) | bit_at(code, level);
    return q;
}

std::int32_t QuantTree::new_node(Kind kind) {
    if (!free_.empty()) {
        const std::int32_t n = free_.back();
        free_.pop_back();
        nodes_[n] = {kind, {-1, -1}};
        return n;
    }
    nodes_.push_back({kind, {-1, -1}});
    return static_cast<std::int32_t>(nodes_.size() - 1);
}

std::vector<std::uint32_t> QuantTree::subtree_labels(std::uint64_t prefix, int level) const {
    const int shift = depth() - level;
    const std::uint64_t lo = prefix << shift, hi = (prefix + 1) << shift;
    std::vector<std::uint32_t> out;
    for (auto it = labels_.lower_bound(lo); it != labels_.end() && it->first < hi; ++it)
        for (const auto& [label, cnt] : it->second) out.push_back(label);
    std::sort(out.begin(), out.end());
    out.erase(std::unique(out.begin(), out.end()), out.end());
    return out;
}

bool QuantTree::label_sets_equal(std::int32_t, std::uint64_t prefix_a, std::int32_t, std::uint64_t prefix_b,
                                 int level) const {
    return subtree_labels(prefix_a, level) == subtree_labels(prefix_b, level);
}

void QuantTree::insert_code(std::uint64_t code, std::uint32_t label) {
    if (depth() < 64 && code >> depth()) throw std::invalid_argument("cell code out of range");
    ++counts_[code];
    if (label != kNoLabel) ++labels_[code][label];
    std::vector<std::int32_t> path{0};
    std::int32_t n = 0;
    int level = 0;
    while (true) {
        Node& node = nodes_[n];
        if (node.kind == Kind::Black) return;  // absorbed by a full region
        if (level == depth()) {
            node.kind = Kind::Black;
            break;
        }
        if (node.kind == Kind::White) {
            const std::int32_t a = new_node(Kind::White);
            const std::int32_t b = new_node(Kind::White);
            nodes_[n].kind = Kind::Internal;
            nodes_[n].child[0] = a;
            nodes_[n].child[1] = b;
        }
        n = nodes_[n].child[bit_at(code, level)];
        ++level;
        path.push_back(n);
    }
    // Merge full siblings upward.
    for (int l = level - 1; l >= 0; --l) {
        Node& p = nodes_[path[l]];
        const std::int32_t a = p.child[0], b = p.child[1];
        if (nodes_[a].kind != Kind::Black || nodes_[b].kind != Kind::Black) break;
        const std::uint64_t prefix = code >> (depth() - l);
        if (!label_sets_equal(a, prefix << 1, b, (prefix << 1) | 1u, l + 1)) break;
        p.kind = Kind::Black;
        p.child[0] = p.child[1] = -1;
        free_.push_back(a);
        free_.push_back(b);
    }
}

std::uint64_t QuantTree::insert(std::span<const double> v, std::uint32_t label) {
    const std::uint64_t code = cell_code(v);
    insert_code(code, label);
    return code;
}

bool QuantTree::contains_code(std::uint64_t code) const {
    std::int32_t n = 0;
    int level = 0;
    while (nodes_[n].kind == Kind::Internal) n = nodes_[n].child[bit_at(code, level++)];
    return nodes_[n].kind == Kind::Black;
}

void QuantTree::collect(std::int32_t n, std::uint64_t prefix, int level, std::vector<std::uint64_t>& out) const {
    const Node& node = nodes_[n];
    if (node.kind == Kind::White) return;
    if (node.kind == Kind::Black) {
        const int shift = depth() - level;
        const std::uint64_t lo = prefix << shift, cnt = std::uint64_t{1} << shift;
        for (std::uint64_t i = 0; i < cnt; ++i) out.push_back(lo + i);
        return;
    }
    collect(node.child[0], prefix << 1, level + 1, out);
    collect(node.child[1], (prefix << 1) | 1u, level + 1, out);
}

std::vector<std::uint64_t> QuantTree::occupied_cells() const {
    std::vector<std::uint64_t> out;
    collect(0, 0, 0, out);
    return out;
}

std::uint64_t QuantTree::leftmost_black(std::int32_t n, std::uint64_t prefix, int level) const {
    while (nodes_[n].kind == Kind::Internal) {
        const int b = nodes_[nodes_[n].child[0]].kind == Kind::White ? 1 : 0;
        n = nodes_[n].child[b];
        prefix = (prefix << 1) | static_cast<std::uint64_t>(b);
        ++level;
    }
    return prefix << (depth() - level);
}

QuantTree::Nearest QuantTree::nearest(std::span<const double> v, int r_query) const {
    if (empty()) throw std::runtime_error("nearest on an empty tree");
    r_query = std::clamp(r_query, 0, r_);
    const std::uint64_t code = cell_code(v);
    std::vector<std::int32_t> path{0};
    std::int32_t n = 0;
    int level = 0;
    while (nodes_[n].kind == Kind::Internal) {
        n = nodes_[n].child[bit_at(code, level++)];
        path.push_back(n);
    }
    Nearest out;
    int shared;  // longest prefix shared with an occupied cell
    if (nodes_[n].kind == Kind::Black)
        shared = depth();
    else
        shared = level - 1;
    out.rounds = std::min(r_query, shared / k_);
    const int target = out.rounds * k_;
    const std::uint64_t prefix = target == 0 ? 0 : code >> (depth() - target);
    if (target >= level)
        out.code = prefix << (depth() - target);
    else
        out.code = leftmost_black(path[target], prefix, target);
    out.distance = std::ldexp(1.0, -out.rounds);
    return out;
}

std::uint64_t QuantTree::count(std::uint64_t code) const {
    const auto it = counts_.find(code);
    return it == counts_.end() ? 0 : it->second;
}

std::size_t QuantTree::node_count() const {
    std::size_t c = 0;
    std::vector<std::int32_t> st{0};
    while (!st.empty()) {
        const Node& n = nodes_[st.back()];
        st.pop_back();
        ++c;
        if (n.kind == Kind::Internal) {
            st.push_back(n.child[0]);
            st.push_back(n.child[1]);
        }
    }
    return c;
}

std::size_t QuantTree::black_leaf_count() const {
    std::size_t c = 0;
    std::vector<std::int32_t> st{0};
    while (!st.empty()) {
        const Node& n = nodes_[st.back()];
        st.pop_back();
        if (n.kind == Kind::Black) ++c;
        if (n.kind == Kind::Internal) {
            st.push_back(n.child[0]);
            st.push_back(n.child[1]);
        }
    }
    return c;
}

namespace {

void put_u32(std::vector<std::uint8_t>& out, std::uint32_t v) {
    for (int i = 0; i < 4; ++i) out.push_back(static_cast<std::uint8_t>(v >> (8 * i)));
}

void put_u64(std::vector<std::uint8_t>& out, std::uint64_t v) {
    for (int i = 0; i < 8; ++i) out.push_back(static_cast<std::uint8_t>(v >> (8 * i)));
}

struct Reader {
    std::span<const std::uint8_t> b;
    std::size_t pos = 0;
    std::uint64_t get(int bytes) {
        if (pos + bytes > b.size()) throw IoError("truncated tree file");
        std::uint64_t v = 0;
        for (int i = 0; i < bytes; ++i) v |= static_cast<std::uint64_t>(b[pos + i]) << (8 * i);
        pos += bytes;
        return v;
    }
};

}  // namespace

std::vector<std::uint8_t> QuantTree::serialize() const {
    std::vector<std::uint8_t> sym;
    std::function<void(std::int32_t)> walk = [&](std::int32_t n) {
        const Node& node = nodes_[n];
        sym.push_back(node.kind == Kind::Internal ? 0 : node.kind == Kind::White ? 1 : 2);
        if (node.kind == Kind::Internal) {
            walk(node.child[0]);
            walk(node.child[1]);
        }
    };
    walk(0);
    std::vector<std::uint8_t> out{'V', 'Q', 'T', '1'};
    put_u32(out, static_cast<std::uint32_t>(k_));
    put_u32(out, static_cast<std::uint32_t>(r_));
    put_u32(out, static_cast<std::uint32_t>(sym.size()));
    for (std::size_t i = 0; i < sym.size(); i += 4) {
        std::uint8_t byte = 0;
        for (std::size_t j = 0; j < 4; ++j)
            byte |= static_cast<std::uint8_t>((i + j < sym.size() ? sym[i + j] : 0) << (6 - 2 * j));
        out.push_back(byte);
    }
    std::size_t rows = counts_.size();
    for (const auto& [code, ls] : labels_) rows += ls.size();
    put_u32(out, static_cast<std::uint32_t>(rows));
    for (const auto& [code, cnt] : counts_) {
        put_u64(out, code);
        put_u32(out, kNoLabel);
        put_u64(out, cnt);
    }
    for (const auto& [code, ls] : labels_)
        for (const auto& [label, cnt] : ls) {
            put_u64(out, code);
            put_u32(out, label);
            put_u64(out, cnt);
        }
    return out;
}

QuantTree QuantTree::deserialize(std::span<const std::uint8_t> bytes) {
    if (bytes.size() < 4 || std::memcmp(bytes.data(), "VQT1", 4) != 0) throw IoError("bad tree magic");
    Reader rd{bytes, 4};
    const int k = static_cast<int>(rd.get(4));
    const int r = static_cast<int>(rd.get(4));
    if (k < 1 || r < 1 || k * r > 63) throw IoError("bad tree header");
    QuantTree t(k, r);
    const std::uint32_t nsym = static_cast<std::uint32_t>(rd.get(4));
    const std::size_t nbytes = (nsym + 3) / 4;
    if (rd.pos + nbytes > bytes.size()) throw IoError("truncated node stream");
    std::size_t si = 0;
    auto next_sym = [&]() -> int {
        if (si >= nsym) throw IoError("node stream ended early");
        const std::uint8_t byte = bytes[rd.pos + si / 4];
        const int s = (byte >> (6 - 2 * (si % 4))) & 3;
        ++si;
        return s;
    };
    t.nodes_.clear();
    std::function<std::int32_t(int)> build = [&](int level) -> std::int32_t {
        const int s = next_sym();
        if (s == 3) throw IoError("invalid node symbol");
        const std::int32_t id = static_cast<std::int32_t>(t.nodes_.size());
        t.nodes_.push_back({s == 0 ? Kind::Internal : s == 1 ? Kind::White : Kind::Black, {-1, -1}});
        if (s == 0) {
            if (level >= t.depth()) throw IoError("tree deeper than k*r");
            const std::int32_t a = build(level + 1);
            const std::int32_t b = build(level + 1);
            t.nodes_[id].child[0] = a;
            t.nodes_[id].child[1] = b;
        }
        return id;
    };
    build(0);
    if (si != nsym) throw IoError("trailing node symbols");
    rd.pos += nbytes;
    const std::uint32_t rows = static_cast<std::uint32_t>(rd.get(4));
    for (std::uint32_t i = 0; i < rows; ++i) {
        const std::uint64_t code = rd.get(8);
        const std::uint32_t label = static_cast<std::uint32_t>(rd.get(4));
        const std::uint64_t cnt = rd.get(8);
        if (label == kNoLabel)
            t.counts_[code] = cnt;
        else
            t.labels_[code][label] = cnt;
    }
    return t;
}

bool QuantTree::operator==(const QuantTree& o) const { return serialize() == o.serialize(); }

double hausdorff_distance(std::span<const double> u, std::span<const double> v, int r) {
    if (u.size() != v.size() || u.empty()) throw std::invalid_argument("vector dimension mismatch");
    const QuantTree t(static_cast<int>(u.size()), r);
    const std::uint64_t a = t.cell_code(u), b = t.cell_code(v);
    int shared = 0;
    while (shared < t.depth() && ((a >> (t.depth() - 1 - shared)) & 1u) == ((b >> (t.depth() - 1 - shared)) & 1u))
        ++shared;
    return std::ldexp(1.0, -(shared / t.dimension()));
}

std::vector<std::uint64_t> self_sort(const QuantTree& tree) {
    if (tree.empty()) throw std::runtime_error("self_sort on an empty tree");
    auto cells = tree.occupied_cells();
    std::vector<std::pair<std::uint64_t, std::uint64_t>> keyed;
    keyed.reserve(cells.size());
    for (std::uint64_t c : cells) {
        const auto q = tree.cell_coords(c);
        keyed.push_back({hilbert_kd_index(tree.dimension(), tree.precision(), q), c});
    }
    std::sort(keyed.begin(), keyed.end());
    for (std::size_t i = 0; i < keyed.size(); ++i) cells[i] = keyed[i].second;
    return cells;
}

}  // namespace viseme
