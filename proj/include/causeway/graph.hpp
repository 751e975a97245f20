#pragma once

#include <bit>
#include <compare>
#include <cstddef>
#include <cstdint>
#include <optional>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

namespace causeway {

using NodeId = std::size_t;

// Graphs are desk-scale: node sets are 64-bit masks.
inline constexpr std::size_t kMaxNodes = 64;

class NodeSet {
public:
    class iterator {
    public:
        using value_type = NodeId;
        using difference_type = std::ptrdiff_t;

        iterator() = default;
        explicit iterator(std::uint64_t rest) : rest_(rest) {}
        NodeId operator*() const { return static_cast<NodeId>(std::countr_zero(rest_)); }
        iterator& operator++() {
            rest_ &= rest_ - 1;
            return *this;
        }
        iterator operator++(int) {
            auto tmp = *this;
            ++*this;
            return tmp;
        }
        bool operator==(const iterator&) const = default;

    private:
        std::uint64_t rest_ = 0;
    };

    constexpr NodeSet() = default;
    static constexpr NodeSet from_bits(std::uint64_t bits) { return NodeSet(bits); }
    static constexpr NodeSet single(NodeId v) { return NodeSet(std::uint64_t{1} << v); }
    static constexpr NodeSet first(std::size_t n) {
        return NodeSet(n >= 64 ? ~std::uint64_t{0} : (std::uint64_t{1} << n) - 1);
    }

    constexpr std::uint64_t bits() const { return bits_; }
    constexpr bool empty() const { return bits_ == 0; }
    constexpr std::size_t size() const { return static_cast<std::size_t>(std::popcount(bits_)); }
    constexpr bool contains(NodeId v) const { return (bits_ >> v) & 1U; }
    constexpr bool subset_of(NodeSet other) const { return (bits_ & ~other.bits_) == 0; }
    constexpr bool intersects(NodeSet other) const { return (bits_ & other.bits_) != 0; }
    constexpr NodeId min() const { return static_cast<NodeId>(std::countr_zero(bits_)); }

    void insert(NodeId v) { bits_ |= std::uint64_t{1} << v; }
    void erase(NodeId v) { bits_ &= ~(std::uint64_t{1} << v); }

    iterator begin() const { return iterator(bits_); }
    iterator end() const { return iterator(0); }
    std::vector<NodeId> to_vector() const { return {begin(), end()}; }

    constexpr NodeSet operator|(NodeSet o) const { return NodeSet(bits_ | o.bits_); }
    constexpr NodeSet operator&(NodeSet o) const { return NodeSet(bits_ & o.bits_); }
    constexpr NodeSet operator-(NodeSet o) const { return NodeSet(bits_ & ~o.bits_); }
    NodeSet& operator|=(NodeSet o) { bits_ |= o.bits_; return *this; }
    NodeSet& operator&=(NodeSet o) { bits_ &= o.bits_; return *this; }
    NodeSet& operator-=(NodeSet o) { bits_ &= ~o.bits_; return *this; }
    constexpr bool operator==(const NodeSet&) const = default;

private:
    constexpr explicit NodeSet(std::uint64_t bits) : bits_(bits) {}
    std::uint64_t bits_ = 0;
};

// Lexicographic order on the sorted member lists; with name-sorted node ids
// this is lexicographic order by variable name.
bool lex_less(NodeSet a, NodeSet b);

// Acyclic directed mixed graph. Nodes are kept sorted by name, so NodeId order
// is name order. Bidirected edges stand for latent common causes.
class Admg {
public:
    using Edge = std::pair<std::string, std::string>;

    Admg() = default;
    Admg(std::vector<std::string> nodes, const std::vector<Edge>& directed, const std::vector<Edge>& bidirected);

    std::size_t size() const { return names_.size(); }
    NodeSet all() const { return NodeSet::first(names_.size()); }
    const std::vector<std::string>& names() const { return names_; }
    const std::string& name(NodeId v) const { return names_.at(v); }
    std::optional<NodeId> find(std::string_view name) const;
    NodeId id(std::string_view name) const;
    NodeSet ids(const std::vector<std::string>& names) const;
    std::vector<std::string> names_of(NodeSet s) const;

    NodeSet parents(NodeId v) const { return parents_[v]; }
    NodeSet children(NodeId v) const { return children_[v]; }
    NodeSet siblings(NodeId v) const { return siblings_[v]; }
    bool has_directed(NodeId from, NodeId to) const { return children_[from].contains(to); }
    bool has_bidirected(NodeId a, NodeId b) const { return siblings_[a].contains(b); }
    bool adjacent(NodeId a, NodeId b) const {
        return has_directed(a, b) || has_directed(b, a) || has_bidirected(a, b);
    }

    std::vector<std::pair<NodeId, NodeId>> directed_edges() const;
    std::vector<std::pair<NodeId, NodeId>> bidirected_edges() const;

    // Inclusive closures.
    NodeSet ancestors(NodeSet s) const;
    NodeSet descendants(NodeSet s) const;
    NodeSet ancestors_within(NodeSet s, NodeSet within) const;

    // Directed-part topological order, ties broken by name.
    std::vector<NodeId> topological_order() const;

    // Same node set with every edge that has an arrowhead at `into` removed
    // and every directed edge leaving `out_of` removed.
    Admg without_edges(NodeSet into, NodeSet out_of) const;

    // Subgraph induced by `keep`, reindexed.
    Admg induced(NodeSet keep) const;

    bool operator==(const Admg&) const = default;

private:
    std::vector<std::string> names_;
    std::vector<NodeSet> parents_;
    std::vector<NodeSet> children_;
    std::vector<NodeSet> siblings_;
};

struct CiStatement {
    std::vector<std::string> left;
    std::vector<std::string> right;
    std::vector<std::string> given;

    // `X _||_ Y | Z,W`, or `X _||_ Y` when unconditional.
    std::string to_string() const;
    bool operator==(const CiStatement&) const = default;
};

Admg parse_graph(std::string_view text);
std::string serialize(const Admg& g);

bool d_separated(const Admg& g, NodeSet a, NodeSet b, NodeSet z);
bool d_separated(const Admg& g, const std::vector<std::string>& a, const std::vector<std::string>& b,
                 const std::vector<std::string>& z);

// Components of the bidirected-only subgraph restricted to `within`,
// ordered by smallest member.
std::vector<NodeSet> c_components(const Admg& g, NodeSet within);
std::vector<NodeSet> c_components(const Admg& g);

// One statement per nonadjacent pair that some subset of the pair's ancestors
// separates; smallest separator, ties lexicographic.
std::vector<CiStatement> testable_implications(const Admg& g);

}  // namespace causeway
