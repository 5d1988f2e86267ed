#include <algorithm>
#include <deque>
#include <functional>
#include <json.hpp>
#include <string>

#include "gak/error.hpp"
#include "gak/tree.hpp"

namespace gak {

using nlohmann::json;

PartitionTree::PartitionTree(std::vector<TreeNodeSpec> nodes, std::size_t root) {
    if (root >= nodes.size()) throw InvalidArgument("PartitionTree: root id out of range");
    const std::size_t n = nodes[root].members.size();
    if (n == 0) throw InvalidArgument("PartitionTree: empty index set");

    for (auto& s : nodes) std::sort(s.members.begin(), s.members.end());
    {
        const auto& rm = nodes[root].members;
        for (std::size_t i = 0; i < n; ++i)
            if (rm[i] != i) throw InvalidArgument("PartitionTree: root must be exactly {0,...,n-1}");
    }

    // Breadth-first renumbering; validates the partition property on the way.
    std::vector<std::size_t> order;
    std::vector<std::size_t> depth_of(nodes.size(), kNoFolder);
    std::deque<std::size_t> queue{root};
    depth_of[root] = 0;
    while (!queue.empty()) {
        const std::size_t u = queue.front();
        queue.pop_front();
        order.push_back(u);
        const auto& ch = nodes[u].children;
        if (ch.size() == 1) throw InvalidArgument("PartitionTree: folder with a single child");
        std::vector<std::size_t> uni;
        for (std::size_t c : ch) {
            if (c >= nodes.size()) throw InvalidArgument("PartitionTree: child id out of range");
            if (depth_of[c] != kNoFolder) throw InvalidArgument("PartitionTree: node reached twice");
            if (nodes[c].members.empty()) throw InvalidArgument("PartitionTree: empty child folder");
            depth_of[c] = depth_of[u] + 1;
            uni.insert(uni.end(), nodes[c].members.begin(), nodes[c].members.end());
            queue.push_back(c);
        }
        if (!ch.empty()) {
            std::sort(uni.begin(), uni.end());
            if (uni != nodes[u].members)
                throw InvalidArgument("PartitionTree: children do not partition their parent");
        }
    }

    std::vector<std::size_t> new_id(nodes.size(), kNoFolder);
    for (std::size_t i = 0; i < order.size(); ++i) new_id[order[i]] = i;
    folders_.resize(order.size());
    std::size_t max_depth = 0;
    std::vector<std::size_t> per_depth_count;
    for (std::size_t i = 0; i < order.size(); ++i) {
        const std::size_t u = order[i];
        Folder& f = folders_[i];
        f.level = depth_of[u];
        max_depth = std::max(max_depth, f.level);
        if (per_depth_count.size() <= f.level) per_depth_count.resize(f.level + 1, 0);
        f.index = per_depth_count[f.level]++;
        for (std::size_t c : nodes[u].children) {
            f.children.push_back(new_id[c]);
            folders_[new_id[c]].parent = i;
        }
    }

    // Leaf order and contiguous member ranges.
    std::vector<std::size_t> leaf_seq;
    leaf_seq.reserve(n);
    std::function<void(std::size_t)> walk = [&](std::size_t id) {
        Folder& f = folders_[id];
        f.offset = leaf_seq.size();
        if (f.children.empty()) {
            const auto& m = nodes[order[id]].members;
            leaf_seq.insert(leaf_seq.end(), m.begin(), m.end());
        } else {
            for (std::size_t c : f.children) walk(c);
        }
        f.members.assign(leaf_seq.begin() + static_cast<std::ptrdiff_t>(f.offset), leaf_seq.end());
    };
    walk(0);
    leaf_order_ = Permutation(std::move(leaf_seq));

    levels_.assign(max_depth + 1, {});
    levels_[0] = {0};
    for (std::size_t l = 1; l <= max_depth; ++l)
        for (std::size_t id : levels_[l - 1]) {
            const auto s = split_of(id);
            levels_[l].insert(levels_[l].end(), s.begin(), s.end());
        }
}

PartitionTree PartitionTree::dyadic(std::size_t n) { return dyadic(Permutation::identity(n)); }

PartitionTree PartitionTree::dyadic(const Permutation& order) {
    const std::size_t n = order.size();
    if (n == 0) throw InvalidArgument("PartitionTree::dyadic: empty index set");
    std::vector<TreeNodeSpec> specs;
    std::function<std::size_t(std::size_t, std::size_t)> make = [&](std::size_t lo, std::size_t hi) {
        const std::size_t id = specs.size();
        specs.push_back({});
        for (std::size_t i = lo; i < hi; ++i) specs[id].members.push_back(order[i]);
        if (hi - lo > 1) {
            const std::size_t mid = lo + (hi - lo + 1) / 2;
            const std::size_t a = make(lo, mid);
            const std::size_t b = make(mid, hi);
            specs[id].children = {a, b};
        }
        return id;
    };
    make(0, n);
    return PartitionTree(std::move(specs));
}

const std::vector<std::size_t>& PartitionTree::folders_at_level(std::size_t level) const {
    if (level >= levels_.size())
        throw InvalidArgument("folders_at_level: level " + std::to_string(level) + " > depth " +
                              std::to_string(depth()));
    return levels_[level];
}

std::vector<std::size_t> PartitionTree::leaf_folders() const {
    return levels_.empty() ? std::vector<std::size_t>{} : levels_.back();
}

std::vector<std::size_t> PartitionTree::split_of(std::size_t id) const {
    const Folder& f = folders_.at(id);
    if (f.children.empty()) return {id};
    return f.children;
}

bool PartitionTree::is_balanced() const {
    for (const Folder& f : folders_) {
        if (f.children.empty()) continue;
        if (f.children.size() != 2) return false;
        const std::size_t a = folders_[f.children[0]].size(), b = folders_[f.children[1]].size();
        if ((a > b ? a - b : b - a) > 1) return false;
    }
    return true;
}

std::vector<TreeNodeSpec> PartitionTree::spec() const {
    std::vector<TreeNodeSpec> out(folders_.size());
    for (std::size_t i = 0; i < folders_.size(); ++i) {
        out[i].members = folders_[i].members;
        out[i].children = folders_[i].children;
    }
    return out;
}

namespace {

json node_json(const PartitionTree& T, std::size_t id) {
    const Folder& f = T.folder(id);
    json j;
    j["level"] = f.level;
    j["k"] = f.index;
    std::vector<std::size_t> m = f.members;
    std::sort(m.begin(), m.end());
    j["members"] = m;
    json ch = json::array();
    for (std::size_t c : f.children) ch.push_back(node_json(T, c));
    j["children"] = ch;
    return j;
}

std::size_t parse_node(const json& j, std::vector<TreeNodeSpec>& specs) {
    const std::size_t id = specs.size();
    specs.push_back({});
    specs[id].members = j.at("members").get<std::vector<std::size_t>>();
    std::vector<std::size_t> kids;
    for (const json& c : j.at("children")) kids.push_back(parse_node(c, specs));
    specs[id].children = std::move(kids);
    return id;
}

}  // namespace

std::string PartitionTree::to_json() const {
    json j;
    j["n"] = n();
    j["depth"] = depth();
    j["leaf_order"] = leaf_order_.map();
    j["root"] = node_json(*this, 0);
    return j.dump();
}

PartitionTree PartitionTree::from_json(const std::string& text) {
    json j;
    try {
        j = json::parse(text);
    } catch (const json::exception& e) {
        throw FormatError(FormatError::Kind::malformed, std::string("tree json: ") + e.what());
    }
    std::vector<TreeNodeSpec> specs;
    try {
        parse_node(j.at("root"), specs);
    } catch (const json::exception& e) {
        throw FormatError(FormatError::Kind::malformed, std::string("tree json: ") + e.what());
    }
    return PartitionTree(std::move(specs));
}

}  // namespace gak
