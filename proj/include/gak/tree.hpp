#pragma once

#include <cstddef>
#include <cstdint>
#include <limits>
#include <span>
#include <string>
#include <vector>

#include "gak/graph.hpp"
#include "gak/permutation.hpp"

namespace gak {

inline constexpr std::size_t kNoFolder = std::numeric_limits<std::size_t>::max();

struct Folder {
    std::size_t level = 0;           // depth of the node itself
    std::size_t index = 0;           // left-to-right position among nodes of that depth
    std::size_t parent = kNoFolder;  // node id
    std::vector<std::size_t> children;
    std::vector<std::size_t> members;  // listed in leaf order
    std::size_t offset = 0;            // position of members[0] in leaf order

    std::size_t size() const noexcept { return members.size(); }
    bool is_leaf() const noexcept { return children.empty(); }
};

// Input form: members as a set, children by index into the same list.
struct TreeNodeSpec {
    std::vector<std::size_t> members;
    std::vector<std::size_t> children;
};

// Hierarchy of folders over {0,...,n-1}. Node ids are assigned breadth
// first, left to right; node 0 is the root. A leaf shallower than the
// deepest level is repeated in every deeper level list, so each level list
// partitions the index set.
class PartitionTree {
public:
    PartitionTree() = default;
    explicit PartitionTree(std::vector<TreeNodeSpec> nodes, std::size_t root = 0);

    // Balanced split of 0..n-1 in index order, larger half on the left.
    static PartitionTree dyadic(std::size_t n);
    // Same split applied to the sequence order[0], ..., order[n-1].
    static PartitionTree dyadic(const Permutation& order);

    std::size_t n() const noexcept { return leaf_order_.size(); }
    std::size_t depth() const noexcept { return levels_.empty() ? 0 : levels_.size() - 1; }
    std::size_t node_count() const noexcept { return folders_.size(); }
    const Folder& folder(std::size_t id) const { return folders_.at(id); }
    const std::vector<Folder>& folders() const noexcept { return folders_; }

    const std::vector<std::size_t>& folders_at_level(std::size_t level) const;
    std::vector<std::size_t> leaf_folders() const;
    const Permutation& leaf_order() const noexcept { return leaf_order_; }

    // Level-(l+1) entries covering a level-l entry: its children, or itself
    // when it is a leaf carried down.
    std::vector<std::size_t> split_of(std::size_t id) const;

    // True when every split divides a folder into two parts whose sizes
    // differ by at most one.
    bool is_balanced() const;

    std::vector<TreeNodeSpec> spec() const;

    std::string to_json() const;
    static PartitionTree from_json(const std::string& text);

private:
    std::vector<Folder> folders_;
    std::vector<std::vector<std::size_t>> levels_;
    Permutation leaf_order_;
};

enum class SplitMode { median, sign };

struct TreeOptions {
    SplitMode mode = SplitMode::median;
    std::size_t leaf_max = 1;
    std::uint64_t seed = 0;  // landmark sampling for folders above graph::kLandmarkThreshold
};

PartitionTree build_tree(const AffinityMatrix& W, const TreeOptions& opts = {});

}  // namespace gak
