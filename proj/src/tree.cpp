#include "mdhc/tree.hpp"

#include <cmath>
#include <fstream>
#include <ostream>

#include <json.hpp>

namespace mdhc {

using ordered_json = nlohmann::ordered_json;

TreeModel::TreeModel(int depth, int dim, const LearnConfig& cfg)
    : depth_(depth), dim_(dim), cfg_(cfg) {
    if (depth < 2) throw InvalidArgumentError("tree: depth must be >= 2");
    if (dim < 1) throw InvalidArgumentError("tree: dim must be >= 1");
    cfg.validate();
    int n = node_count();
    nodes_.reserve(static_cast<std::size_t>(n) + 1);
    nodes_.emplace_back(1, 0); // index 0 placeholder, never used
    for (int id = 1; id <= n; ++id)
        nodes_.emplace_back(dim, mix_seed(cfg.seed, static_cast<std::uint64_t>(id)));
}

void TreeModel::check_dim(const Eigen::Ref<const Eigen::VectorXd>& x) const {
    if (x.size() != dim_)
        throw DimensionError("tree: expected dimension " + std::to_string(dim_) +
                             ", got " + std::to_string(x.size()));
}

int TreeModel::route_child(const NodeState& n, const Eigen::Ref<const Eigen::VectorXd>& x,
                           int id) const {
    double p = n.hyperplane.v.dot(x - n.mean.mean());
    return p < n.hyperplane.b ? 2 * id : 2 * id + 1;
}

int TreeModel::observe(const Eigen::Ref<const Eigen::VectorXd>& x,
                       std::vector<int>* path) {
    check_dim(x);
    if (path) path->clear();
    int id = 1;
    while (true) {
        NodeState& n = nodes_[static_cast<std::size_t>(id)];
        if (path) path->push_back(id);
        ++n.count;
        n.mean.update(x);
        Eigen::VectorXd centered = x - n.mean.mean();
        n.proj_moments.update(n.hyperplane.v.dot(centered));
        if (is_internal(id) && n.count > kWarmupObservations) {
            // the schedule clock starts after warm-up so the large early
            // learning rates are not spent while the hyperplane is frozen
            bool degenerate = false;
            n.hyperplane = mdh_step(n.hyperplane, centered, n.count - kWarmupObservations,
                                    n.proj_moments.stddev(), cfg_, &degenerate);
            if (degenerate) ++n.degenerate_steps;
        }
        n.ss_acc.update(x);
        if (!is_internal(id)) break;
        id = route_child(n, x, id);
    }
    ++total_count_;
    return id;
}

int TreeModel::assign(const Eigen::Ref<const Eigen::VectorXd>& x) const {
    check_dim(x);
    int id = 1;
    while (is_internal(id)) id = route_child(nodes_[static_cast<std::size_t>(id)], x, id);
    return id;
}

int TreeModel::cluster_of_leaf(int leaf_id) const {
    if (selection_.k == 0) throw InvalidArgumentError("tree: no selection attached");
    // Exactly one selected leaf lies on the root-to-leaf path.
    for (int id = leaf_id; id >= 1; id /= 2) {
        for (std::size_t i = 0; i < selection_.leaves.size(); ++i)
            if (selection_.leaves[i] == id) return static_cast<int>(i);
    }
    throw InvalidArgumentError("tree: leaf " + std::to_string(leaf_id) +
                               " has no selected ancestor");
}

std::vector<double> TreeModel::node_ss() const {
    std::vector<double> out(static_cast<std::size_t>(node_count()));
    for (int id = 1; id <= node_count(); ++id)
        out[static_cast<std::size_t>(id - 1)] = nodes_[static_cast<std::size_t>(id)].ss_acc.ss();
    return out;
}

void TreeModel::set_selection(Selection sel) {
    if (sel.k != static_cast<int>(sel.leaves.size()))
        throw InvalidArgumentError("selection: k must equal the number of leaves");
    selection_ = std::move(sel);
}

namespace {

ordered_json vec_to_json(const Eigen::VectorXd& v) {
    ordered_json a = ordered_json::array();
    for (Eigen::Index i = 0; i < v.size(); ++i) a.push_back(v[i]);
    return a;
}

Eigen::VectorXd vec_from_json(const ordered_json& a) {
    Eigen::VectorXd v(static_cast<Eigen::Index>(a.size()));
    for (std::size_t i = 0; i < a.size(); ++i) v[static_cast<Eigen::Index>(i)] = a[i].get<double>();
    return v;
}

} // namespace

void TreeModel::save(std::ostream& out) const {
    ordered_json j;
    j["format"] = "mdhc-model";
    j["version"] = 1;
    j["depth"] = depth_;
    j["dim"] = dim_;
    j["total_count"] = total_count_;
    ordered_json jc;
    jc["C"] = cfg_.C;
    jc["alpha_factor"] = cfg_.alpha_factor;
    jc["q"] = cfg_.q;
    jc["r"] = cfg_.r;
    jc["gbar1_scale"] = cfg_.gbar1_scale;
    jc["gbar2"] = cfg_.gbar2;
    jc["eta"] = cfg_.eta;
    jc["h_floor"] = cfg_.h_floor;
    jc["seed"] = cfg_.seed;
    j["config"] = jc;
    ordered_json jn = ordered_json::array();
    for (int id = 1; id <= node_count(); ++id) {
        const NodeState& n = nodes_[static_cast<std::size_t>(id)];
        ordered_json e;
        e["id"] = id;
        e["v"] = vec_to_json(n.hyperplane.v);
        e["b"] = n.hyperplane.b;
        e["count"] = n.count;
        e["mean"] = vec_to_json(n.mean.mean());
        e["proj"] = {{"count", n.proj_moments.count()},
                     {"mean", n.proj_moments.mean()},
                     {"m2", n.proj_moments.m2()}};
        e["ss_mean"] = vec_to_json(n.ss_acc.mean());
        e["ss"] = n.ss_acc.ss();
        e["degenerate_steps"] = n.degenerate_steps;
        jn.push_back(std::move(e));
    }
    j["nodes"] = std::move(jn);
    if (selection_.k > 0) {
        j["selection"] = {{"k", selection_.k}, {"leaves", selection_.leaves}};
    }
    out << j.dump(2) << '\n';
}

void TreeModel::save(const std::string& path) const {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw IoError("cannot open model file for writing: " + path);
    save(out);
    if (!out) throw IoError("failed writing model file: " + path);
}

TreeModel TreeModel::load(std::istream& in) {
    ordered_json j;
    try {
        in >> j;
    } catch (const nlohmann::json::exception& e) {
        throw ParseError(std::string("model file: ") + e.what());
    }
    try {
        if (j.at("format").get<std::string>() != "mdhc-model")
            throw ParseError("model file: unrecognized format field");
        const auto& jc = j.at("config");
        LearnConfig cfg;
        cfg.C = jc.at("C").get<double>();
        cfg.alpha_factor = jc.at("alpha_factor").get<double>();
        cfg.q = jc.at("q").get<double>();
        cfg.r = jc.at("r").get<double>();
        cfg.gbar1_scale = jc.at("gbar1_scale").get<double>();
        cfg.gbar2 = jc.at("gbar2").get<double>();
        cfg.eta = jc.at("eta").get<double>();
        cfg.h_floor = jc.at("h_floor").get<double>();
        cfg.seed = jc.at("seed").get<std::uint64_t>();
        TreeModel t(j.at("depth").get<int>(), j.at("dim").get<int>(), cfg);
        t.total_count_ = j.at("total_count").get<std::uint64_t>();
        for (const auto& e : j.at("nodes")) {
            int id = e.at("id").get<int>();
            if (id < 1 || id > t.node_count())
                throw ParseError("model file: node id out of range");
            NodeState& n = t.nodes_[static_cast<std::size_t>(id)];
            n.hyperplane.v = vec_from_json(e.at("v"));
            n.hyperplane.b = e.at("b").get<double>();
            n.count = e.at("count").get<std::uint64_t>();
            n.mean.restore(n.count, vec_from_json(e.at("mean")));
            n.proj_moments.restore(e.at("proj").at("count").get<std::uint64_t>(),
                                   e.at("proj").at("mean").get<double>(),
                                   e.at("proj").at("m2").get<double>());
            n.ss_acc.restore(n.count, vec_from_json(e.at("ss_mean")), e.at("ss").get<double>());
            n.degenerate_steps = e.at("degenerate_steps").get<std::uint64_t>();
        }
        if (j.contains("selection")) {
            Selection sel;
            sel.k = j["selection"].at("k").get<int>();
            sel.leaves = j["selection"].at("leaves").get<std::vector<int>>();
            t.set_selection(std::move(sel));
        }
        return t;
    } catch (const nlohmann::json::exception& e) {
        throw ParseError(std::string("model file: ") + e.what());
    }
}

TreeModel TreeModel::load(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw IoError("cannot open model file: " + path);
    return load(static_cast<std::istream&>(in));
}

} // namespace mdhc
