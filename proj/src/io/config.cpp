#include "auxrl/io/config.hpp"

#include <algorithm>
#include <cstdio>
#include <fstream>
#include <set>
#include <sstream>

#include "auxrl/errors.hpp"

namespace auxrl::io {

using nlohmann::json;

namespace {

// Reads fields of one JSON object, collecting problems instead of throwing.
class Fields {
public:
    Fields(const json& obj, std::string path, std::vector<std::string>& problems)
        : obj_(obj), path_(std::move(path)), problems_(problems) {
        if (!obj_.is_object()) {
            problems_.push_back(where("") + "expected an object");
            ok_ = false;
        }
    }

    bool has(const char* key) {
        known_.insert(key);
        return ok_ && obj_.contains(key) && !obj_.at(key).is_null();
    }

    const json& at(const char* key) const { return obj_.at(key); }

    template <typename T>
    void get(const char* key, T& out, const char* type_name) {
        if (!has(key)) return;
        try {
            out = obj_.at(key).get<T>();
        } catch (const json::exception&) {
            problems_.push_back(where(key) + "expected " + type_name);
        }
    }

    void problem(const char* key, const std::string& msg) { problems_.push_back(where(key) + msg); }

    void finish() {
        if (!ok_) return;
        for (const auto& [key, _] : obj_.items())
            if (!known_.count(key)) problems_.push_back(where(key) + "unknown key");
    }

    std::string where(const std::string& key) const {
        std::string p = path_.empty() ? key : (key.empty() ? path_ : path_ + "." + key);
        return p + ": ";
    }

private:
    const json& obj_;
    std::string path_;
    std::vector<std::string>& problems_;
    std::set<std::string> known_;
    bool ok_ = true;
};

// Integers must be integral JSON numbers; doubles accept any number.
template <typename T>
void get_int(Fields& f, const char* key, T& out) {
    if (!f.has(key)) return;
    const json& v = f.at(key);
    if (!v.is_number_integer()) {
        f.problem(key, "expected an integer");
        return;
    }
    if (std::is_unsigned_v<T> && v.is_number_integer() && !v.is_number_unsigned() && v.get<std::int64_t>() < 0) {
        f.problem(key, "must be >= 0");
        return;
    }
    out = v.get<T>();
}

void get_double(Fields& f, const char* key, double& out) { f.get(key, out, "a number"); }

agents::AgentConfig parse_agent(const json& j, agents::Algorithm algo, std::vector<std::string>& problems) {
    agents::AgentConfig a;
    a.algorithm = algo;
    Fields f(j, "agent", problems);
    get_double(f, "gamma", a.gamma);
    get_double(f, "tau", a.tau);
    get_int(f, "batch_size", a.batch_size);
    f.get("hidden", a.hidden, "a list of integers");
    get_double(f, "actor_lr", a.actor_lr);
    get_double(f, "critic_lr", a.critic_lr);
    get_double(f, "reward_scale", a.reward_scale);
    get_int(f, "buffer_capacity", a.buffer_capacity);
    get_double(f, "exploration_noise", a.exploration_noise);
    get_double(f, "target_noise", a.target_noise);
    get_double(f, "target_noise_clip", a.target_noise_clip);
    get_int(f, "policy_delay", a.policy_delay);
    get_double(f, "init_alpha", a.init_alpha);
    f.get("auto_alpha", a.auto_alpha, "a boolean");
    get_double(f, "alpha_lr", a.alpha_lr);
    if (f.has("target_entropy")) {
        const json& v = f.at("target_entropy");
        if (v.is_string() && v.get<std::string>() == "auto") {
            a.default_target_entropy = true;
        } else if (v.is_number()) {
            a.default_target_entropy = false;
            a.target_entropy = v.get<double>();
        } else {
            f.problem("target_entropy", "expected \"auto\" or a number");
        }
    }
    get_double(f, "log_std_min", a.log_std_min);
    get_double(f, "log_std_max", a.log_std_max);
    f.finish();
    return a;
}

repr::RepresentationConfig parse_representation(const json& j, std::int64_t run_pretrain,
                                                std::vector<std::string>& problems) {
    repr::RepresentationConfig r;
    r.pretrain_steps = static_cast<int>(run_pretrain);
    Fields f(j, "representation", problems);
    if (f.has("task")) {
        try {
            r.task = repr::aux_task_from_string(f.at("task").get<std::string>());
        } catch (const std::exception&) {
            f.problem("task", "got " + f.at("task").dump() + ", expected one of rwp, fsp, fsdp");
        }
    }
    get_int(f, "layers_per_part", r.layers_per_part);
    get_int(f, "width", r.width);
    get_int(f, "pretrain_steps", r.pretrain_steps);
    get_double(f, "learning_rate", r.learning_rate);
    get_int(f, "batch_size", r.batch_size);
    if (f.has("activation")) {
        try {
            r.activation = nn::activation_from_string(f.at("activation").get<std::string>());
        } catch (const std::exception&) {
            f.problem("activation", "expected one of identity, relu, swish, tanh");
        }
    }
    f.finish();
    return r;
}

train::RunConfig parse_run(const json& j, const std::string& path, std::vector<std::string>& problems) {
    train::RunConfig c;
    Fields f(j, path, problems);
    f.get("label", c.label, "a string");
    bool env_ok = false;
    if (f.has("environment")) {
        Fields e(f.at("environment"), path.empty() ? "environment" : path + ".environment", problems);
        e.get("id", c.environment.id, "a string");
        if (e.has("params")) {
            if (e.at("params").is_object())
                c.environment.params = e.at("params");
            else
                e.problem("params", "expected an object");
        }
        e.finish();
        env_ok = true;
    }
    if (!env_ok || c.environment.id.empty()) problems.push_back(f.where("environment.id") + "missing");

    agents::Algorithm algo = agents::Algorithm::td3;
    if (f.has("algorithm")) {
        try {
            algo = agents::algorithm_from_string(f.at("algorithm").get<std::string>());
        } catch (const std::exception&) {
            f.problem("algorithm", "expected td3 or sac");
        }
    }
    get_int(f, "seed", c.seed);
    get_int(f, "total_steps", c.total_steps);
    get_int(f, "pretrain_steps", c.pretrain_steps);
    c.eval_interval = train::default_eval_interval(c.environment.id);
    c.eval_episodes = train::default_eval_episodes(c.environment.id);
    get_int(f, "eval_interval", c.eval_interval);
    get_int(f, "eval_episodes", c.eval_episodes);
    f.get("record_trajectories", c.record_trajectories, "a boolean");

    c.agent = f.has("agent") ? parse_agent(f.at("agent"), algo, problems) : agents::AgentConfig{};
    c.agent.algorithm = algo;
    if (f.has("representation")) c.representation = parse_representation(f.at("representation"), c.pretrain_steps, problems);
    if (f.has("her")) {
        Fields h(f.at("her"), path.empty() ? "her" : path + ".her", problems);
        c.her.enabled = true;
        h.get("enabled", c.her.enabled, "a boolean");
        get_int(h, "k", c.her.k);
        h.finish();
    }
    f.finish();
    return c;
}

// Range checks on the parsed values; fields that failed to parse keep defaults.
void semantic_checks(const train::RunConfig& c, const std::string& path, std::vector<std::string>& problems) {
    for (auto& p : c.validation_errors()) {
        if (p == "environment.id: missing") continue;  // already reported
        std::string full = path.empty() ? p : path + "." + p;
        if (std::find(problems.begin(), problems.end(), full) == problems.end()) problems.push_back(std::move(full));
    }
}

std::uint64_t fnv1a(const std::string& s) {
    std::uint64_t h = 1469598103934665603ull;
    for (unsigned char ch : s) {
        h ^= ch;
        h *= 1099511628211ull;
    }
    return h;
}

}  // namespace

json to_json(const train::RunConfig& c) {
    const auto& a = c.agent;
    json agent = {{"gamma", a.gamma},
                  {"tau", a.tau},
                  {"batch_size", a.batch_size},
                  {"hidden", a.hidden},
                  {"actor_lr", a.actor_lr},
                  {"critic_lr", a.critic_lr},
                  {"reward_scale", a.reward_scale},
                  {"buffer_capacity", a.buffer_capacity},
                  {"exploration_noise", a.exploration_noise},
                  {"target_noise", a.target_noise},
                  {"target_noise_clip", a.target_noise_clip},
                  {"policy_delay", a.policy_delay},
                  {"init_alpha", a.init_alpha},
                  {"auto_alpha", a.auto_alpha},
                  {"alpha_lr", a.alpha_lr},
                  {"log_std_min", a.log_std_min},
                  {"log_std_max", a.log_std_max}};
    agent["target_entropy"] = a.default_target_entropy ? json("auto") : json(a.target_entropy);
    json j = {{"label", c.label},
              {"algorithm", std::string(agents::to_string(a.algorithm))},
              {"seed", c.seed},
              {"total_steps", c.total_steps},
              {"pretrain_steps", c.pretrain_steps},
              {"eval_interval", c.eval_interval},
              {"eval_episodes", c.eval_episodes},
              {"record_trajectories", c.record_trajectories},
              {"environment", {{"id", c.environment.id}, {"params", c.environment.params}}},
              {"agent", agent},
              {"her", {{"enabled", c.her.enabled}, {"k", c.her.k}}}};
    if (c.representation) {
        const auto& r = *c.representation;
        j["representation"] = {{"task", std::string(repr::to_string(r.task))},
                               {"layers_per_part", r.layers_per_part},
                               {"width", r.width},
                               {"pretrain_steps", r.pretrain_steps},
                               {"learning_rate", r.learning_rate},
                               {"batch_size", r.batch_size},
                               {"activation", std::string(nn::to_string(r.activation))}};
    } else {
        j["representation"] = nullptr;
    }
    return j;
}

train::RunConfig run_config_from_json(const json& j) {
    std::vector<std::string> problems;
    train::RunConfig c = parse_run(j, "", problems);
    semantic_checks(c, "", problems);
    if (!problems.empty()) throw ValidationError(std::move(problems));
    return c;
}

std::vector<train::RunConfig> SuiteConfig::expand() const {
    std::vector<train::RunConfig> out;
    for (const auto& r : runs) {
        if (seeds.empty()) {
            out.push_back(r);
            continue;
        }
        for (auto s : seeds) {
            train::RunConfig c = r;
            c.seed = s;
            out.push_back(std::move(c));
        }
    }
    return out;
}

json to_json(const SuiteConfig& s) {
    json runs = json::array();
    for (const auto& r : s.runs) runs.push_back(to_json(r));
    return {{"runs", runs}, {"seeds", s.seeds}, {"output_dir", s.output_dir}, {"parallelism", s.parallelism}};
}

SuiteConfig suite_config_from_json(const json& j) {
    std::vector<std::string> problems;
    SuiteConfig s;
    Fields f(j, "", problems);
    if (f.has("runs")) {
        if (!f.at("runs").is_array()) {
            f.problem("runs", "expected a list");
        } else {
            const json& runs = f.at("runs");
            for (std::size_t i = 0; i < runs.size(); ++i) {
                const std::string path = "runs[" + std::to_string(i) + "]";
                train::RunConfig c = parse_run(runs[i], path, problems);
                semantic_checks(c, path, problems);
                s.runs.push_back(std::move(c));
            }
        }
    }
    f.get("seeds", s.seeds, "a list of non-negative integers");
    f.get("output_dir", s.output_dir, "a string");
    get_int(f, "parallelism", s.parallelism);
    f.finish();
    if (s.parallelism < 1) problems.push_back("parallelism: must be >= 1");
    std::set<std::uint64_t> distinct(s.seeds.begin(), s.seeds.end());
    if (distinct.size() != s.seeds.size()) problems.push_back("seeds: must be distinct");
    if (s.output_dir.empty()) problems.push_back("output_dir: must not be empty");
    if (!problems.empty()) throw ValidationError(std::move(problems));
    return s;
}

bool is_suite(const json& j) { return j.is_object() && j.contains("runs"); }

json load_json_file(const std::filesystem::path& path) {
    std::ifstream in(path);
    if (!in) throw InputError("cannot open " + path.string());
    try {
        return json::parse(in);
    } catch (const json::parse_error& e) {
        throw ConfigError(path.string() + ": " + e.what());
    }
}

namespace {

void set_dotted(json& doc, const std::string& dotted_key, const json& value) {
    json* node = &doc;
    std::stringstream ss(dotted_key);
    std::string part;
    std::vector<std::string> parts;
    while (std::getline(ss, part, '.')) parts.push_back(part);
    if (parts.empty() || std::any_of(parts.begin(), parts.end(), [](const std::string& p) { return p.empty(); }))
        throw ConfigError("override key '" + dotted_key + "' is malformed");
    for (std::size_t i = 0; i + 1 < parts.size(); ++i) {
        json& next = (*node)[parts[i]];
        if (next.is_null()) next = json::object();
        if (!next.is_object()) throw ConfigError("override key '" + dotted_key + "': '" + parts[i] + "' is not an object");
        node = &next;
    }
    (*node)[parts.back()] = value;
}

}  // namespace

void apply_override(json& doc, const std::string& dotted_key, const std::string& value) {
    json v;
    try {
        v = json::parse(value);
    } catch (const json::parse_error&) {
        v = value;
    }
    if (!doc.is_object()) throw ConfigError("configuration root must be an object");
    if (is_suite(doc)) {
        if (dotted_key == "seed") {
            doc["seeds"] = json::array({v});
            return;
        }
        if (dotted_key == "output_dir" || dotted_key == "parallelism" || dotted_key == "seeds") {
            doc[dotted_key] = v;
            return;
        }
        for (auto& r : doc["runs"]) set_dotted(r, dotted_key, v);
        return;
    }
    set_dotted(doc, dotted_key, v);
}

std::string config_hash(const train::RunConfig& cfg) {
    char buf[17];
    std::snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(fnv1a(to_json(cfg).dump())));
    return buf;
}

}  // namespace auxrl::io
