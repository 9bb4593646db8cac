// endorse-dyn: command-line front end for simulation, stability analysis and fitting.

#include "endorse/data.hpp"
#include "endorse/errors.hpp"
#include "endorse/inference.hpp"
#include "endorse/parallel.hpp"
#include "endorse/report.hpp"
#include "endorse/rng.hpp"
#include "endorse/sim.hpp"
#include "endorse/stability.hpp"

#include "CLI11.hpp"
#include "json.hpp"

#include <algorithm>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <map>
#include <sstream>
#include <string>
#include <vector>

namespace fs = std::filesystem;
using nlohmann::json;
using namespace endorse;

namespace {

constexpr const char* kVersion = "0.1.0";

struct Settings {
    std::string score = "springrank";
    int n = 8;
    int m = 1;
    double lambda = 0.995;
    double beta1 = 0.0;
    double beta2 = 0.0;
    int steps = 2000;
    std::uint64_t seed = 0;
    std::string out;
    double alpha_p = 0.85;
    double alpha_s = 1e-8;
    bool mask_diagonal = false;
    std::string init = "uniform";
    std::string warm_start;
    int window = 500;
    bool full_json = false;

    std::string grid_beta1;
    std::string grid_beta2 = "0:0:1";
    int scan_points = 1500;
    bool overlay = false;
    double overlay_lambda = 0.9995;
    int overlay_steps = 50000;

    std::string data;
    std::string dataset;
    int restarts = 5;
    std::vector<std::string> scores{"rootdegree", "pagerank", "springrank"};

    std::string format;
    std::string input;
    int k = 5;
    std::string direction = "hiring-to-degree";
    int top = 0;
    std::string from;
    std::string to;
};

// ---------------------------------------------------------------- config files

struct ConfigEntry {
    std::string key;
    std::string value;
    std::size_t line;
};

std::string scalar_to_string(const json& v) {
    if (v.is_string())
        return v.get<std::string>();
    if (v.is_boolean())
        return v.get<bool>() ? "true" : "false";
    if (v.is_number_float())
        return report::format_double(v.get<double>());
    if (v.is_array()) {
        std::string joined;
        for (const auto& item : v) {
            if (!joined.empty())
                joined += ',';
            joined += scalar_to_string(item);
        }
        return joined;
    }
    return v.dump();
}

// key=value lines (# comments), or the "config" object of a run.json.
std::vector<ConfigEntry> read_config(const fs::path& path) {
    std::ifstream in(path);
    if (!in)
        throw IoError("cannot open config file " + path.string());
    std::stringstream buffer;
    buffer << in.rdbuf();
    const std::string text = buffer.str();
    std::vector<ConfigEntry> entries;

    const auto first = text.find_first_not_of(" \t\r\n");
    if (first != std::string::npos && text[first] == '{') {
        json doc;
        try {
            doc = json::parse(text);
        } catch (const json::parse_error& e) {
            throw FormatError(std::string("config is not valid JSON: ") + e.what());
        }
        if (!doc.contains("config") || !doc["config"].is_object())
            throw FormatError("JSON config needs a \"config\" object");
        for (const auto& [key, value] : doc["config"].items())
            entries.push_back({key, scalar_to_string(value), 0});
        return entries;
    }

    std::istringstream lines(text);
    std::string line;
    std::size_t line_no = 0;
    while (std::getline(lines, line)) {
        ++line_no;
        if (const auto hash = line.find('#'); hash != std::string::npos)
            line.erase(hash);
        const auto trim = [](std::string s) {
            const auto b = s.find_first_not_of(" \t\r");
            const auto e = s.find_last_not_of(" \t\r");
            return b == std::string::npos ? std::string() : s.substr(b, e - b + 1);
        };
        line = trim(line);
        if (line.empty())
            continue;
        const auto eq = line.find('=');
        if (eq == std::string::npos)
            throw FormatError("expected key=value", line_no);
        std::string key = trim(line.substr(0, eq));
        std::replace(key.begin(), key.end(), '_', '-');
        entries.push_back({key, trim(line.substr(eq + 1)), line_no});
    }
    return entries;
}

// ---------------------------------------------------------------- helpers

std::vector<double> parse_grid(const std::string& text, const std::string& flag) {
    std::vector<std::string> parts;
    std::stringstream ss(text);
    std::string part;
    while (std::getline(ss, part, ':'))
        parts.push_back(part);
    if (parts.size() != 3)
        throw ConfigError(flag + " must look like START:STOP:NUM, got '" + text + "'");
    double start = 0.0, stop = 0.0;
    int num = 0;
    try {
        std::size_t used = 0;
        start = std::stod(parts[0], &used);
        if (used != parts[0].size())
            throw std::invalid_argument("start");
        stop = std::stod(parts[1], &used);
        if (used != parts[1].size())
            throw std::invalid_argument("stop");
        num = std::stoi(parts[2], &used);
        if (used != parts[2].size())
            throw std::invalid_argument("num");
    } catch (const std::exception&) {
        throw ConfigError(flag + " must look like START:STOP:NUM, got '" + text + "'");
    }
    if (num < 1)
        throw ConfigError(flag + ": NUM must be at least 1");
    std::vector<double> grid(static_cast<std::size_t>(num));
    for (int i = 0; i < num; ++i)
        grid[static_cast<std::size_t>(i)] = num == 1 ? start : start + (stop - start) * i / (num - 1);
    return grid;
}

fs::path prepare_out(const std::string& out) {
    if (out.empty())
        throw ConfigError("--out is required");
    const fs::path dir(out);
    std::error_code ec;
    fs::create_directories(dir, ec);
    if (ec || !fs::is_directory(dir))
        throw IoError("cannot create output directory " + out + (ec ? ": " + ec.message() : ""));
    return dir;
}

std::ofstream open_out(const fs::path& path) {
    std::ofstream out(path, std::ios::binary);
    if (!out)
        throw IoError("cannot write " + path.string());
    return out;
}

void write_json(const fs::path& path, const json& doc) {
    auto out = open_out(path);
    out << doc.dump(2) << '\n';
    if (!out)
        throw IoError("failed writing " + path.string());
}

core::ModelParams model_params(const Settings& s) {
    core::ModelParams p;
    p.score_kind = parse_score_kind(s.score);
    p.lambda = s.lambda;
    p.m = s.m;
    p.beta = Vector(2);
    p.beta << s.beta1, s.beta2;
    p.alpha_p = s.alpha_p;
    p.alpha_s = s.alpha_s;
    p.seed = s.seed;
    p.mask_diagonal = s.mask_diagonal;
    p.validate();
    return p;
}

// Sums the counts of an interchange CSV onto `labels`; labels absent from `labels` are ignored.
Matrix aggregate_warm_start(const fs::path& path, const std::vector<std::string>& labels) {
    std::ifstream in(path);
    if (!in)
        throw IoError("cannot open warm-start file " + path.string());
    std::string head;
    std::getline(in, head);
    in.seekg(0);
    if (!head.empty() && head.back() == '\r')
        head.pop_back();
    if (head != "period,source,target,count")
        return data::read_labeled_matrix(in, labels);
    const auto warm = data::read_edge_list(in);
    std::map<std::string, Eigen::Index> index;
    for (std::size_t i = 0; i < labels.size(); ++i)
        index[labels[i]] = static_cast<Eigen::Index>(i);
    const auto n = static_cast<Eigen::Index>(labels.size());
    Matrix a = Matrix::Zero(n, n);
    for (const auto& d : warm.deltas)
        for (Eigen::Index i = 0; i < d.rows(); ++i)
            for (Eigen::Index j = 0; j < d.cols(); ++j) {
                if (d(i, j) == 0.0)
                    continue;
                auto src = index.find(warm.node_labels[static_cast<std::size_t>(i)]);
                auto dst = index.find(warm.node_labels[static_cast<std::size_t>(j)]);
                if (src != index.end() && dst != index.end())
                    a(src->second, dst->second) += d(i, j);
            }
    return a;
}

std::vector<std::string> index_labels(int n) {
    std::vector<std::string> labels;
    for (int i = 0; i < n; ++i)
        labels.push_back(std::to_string(i));
    return labels;
}

Matrix initial_state(const Settings& s) {
    if (!s.warm_start.empty())
        return aggregate_warm_start(s.warm_start, index_labels(s.n));
    if (s.init == "uniform")
        return sim::uniform_initial_state(s.n, s.m);
    if (s.init == "random")
        return sim::random_initial_state(s.n, s.m, s.seed);
    throw ConfigError("--init must be uniform or random");
}

json base_record(const std::string& command, const json& config) {
    return json{{"tool", "endorse-dyn"}, {"version", kVersion}, {"command", command}, {"config", config}};
}

json model_config(const Settings& s) {
    return json{{"score", s.score},   {"n", s.n},         {"m", s.m},
                {"lambda", s.lambda}, {"beta1", s.beta1}, {"beta2", s.beta2},
                {"seed", s.seed},     {"alpha-p", s.alpha_p}, {"alpha-s", s.alpha_s},
                {"mask-diagonal", s.mask_diagonal}};
}

json vector_json(const Vector& v) {
    json out = json::array();
    for (Eigen::Index i = 0; i < v.size(); ++i)
        out.push_back(v(i));
    return out;
}

// ---------------------------------------------------------------- commands

int cmd_simulate(const Settings& s) {
    const auto params = model_params(s);
    const Matrix a0 = initial_state(s);
    const fs::path dir = prepare_out(s.out);
    const auto traj = sim::run(params, a0, s.steps);

    {
        auto out = open_out(dir / "trajectory.csv");
        report::write_trajectory_csv(traj, out);
    }
    {
        auto out = open_out(dir / "final_adjacency.csv");
        report::write_matrix_csv(traj.a_final, out);
    }
    if (s.full_json)
        write_json(dir / "trajectory.json", report::trajectory_json(traj));

    json config = model_config(s);
    config["steps"] = s.steps;
    config["init"] = s.init;
    config["window"] = s.window;
    config["full-json"] = s.full_json;
    if (!s.warm_start.empty())
        config["warm-start"] = s.warm_start;
    json record = base_record("simulate", config);
    record["params"] = report::params_json(params);
    record["seed"] = params.seed;
    record["files"] = s.full_json ? json{"trajectory.csv", "final_adjacency.csv", "trajectory.json"}
                                  : json{"trajectory.csv", "final_adjacency.csv"};
    if (s.steps >= s.window && s.window >= 1) {
        record["summary"] = json{{"window", s.window},
                                 {"mean_gamma", vector_json(sim::mean_rank(traj, s.window))},
                                 {"rank_variance", sim::rank_variance(traj, s.window)}};
    }
    write_json(dir / "run.json", record);
    return 0;
}

int cmd_sweep(const Settings& s) {
    const auto params = model_params(s);
    if (s.grid_beta1.empty())
        throw ConfigError("--grid-beta1 is required");
    const auto g1 = parse_grid(s.grid_beta1, "--grid-beta1");
    const auto g2 = parse_grid(s.grid_beta2, "--grid-beta2");
    const Matrix a0 = initial_state(s);
    const fs::path dir = prepare_out(s.out);
    const auto cells = sim::variance_sweep(params, a0, s.steps, s.window, g1, g2);
    {
        auto out = open_out(dir / "sweep.csv");
        report::write_sweep_csv(cells, out);
    }
    json config = model_config(s);
    config["steps"] = s.steps;
    config["init"] = s.init;
    config["window"] = s.window;
    config["grid-beta1"] = s.grid_beta1;
    config["grid-beta2"] = s.grid_beta2;
    if (!s.warm_start.empty())
        config["warm-start"] = s.warm_start;
    json record = base_record("sweep", config);
    record["files"] = {"sweep.csv"};
    record["cell_seed_rule"] = "mix_seed(seed, beta1_index * len(grid_beta2) + beta2_index)";
    write_json(dir / "run.json", record);
    return 0;
}

int cmd_bifurcate(const Settings& s) {
    const auto params = model_params(s);
    if (s.grid_beta1.empty())
        throw ConfigError("--grid-beta1 is required");
    const auto grid = parse_grid(s.grid_beta1, "--grid-beta1");
    const fs::path dir = prepare_out(s.out);

    const auto model = stability::drift_model(params, s.n);
    stability::TwoGroupOptions options;
    options.scan_points = s.scan_points;
    const auto points = stability::bifurcation_diagram(model, grid, options);
    {
        auto out = open_out(dir / "branches.csv");
        report::write_branches_csv(points, out);
    }
    {
        auto out = open_out(dir / "branches_gamma.csv");
        out << "beta1,k_elite,branch,gamma_elite,gamma_rest,stable\n";
        for (const auto& p : points) {
            const auto& eq = p.equilibrium;
            out << report::format_double(p.beta1) << ',' << p.k_elite << ',' << p.branch << ','
                << report::format_double(eq.gamma(0)) << ','
                << report::format_double(eq.gamma(eq.gamma.size() - 1)) << ',' << (eq.stable ? 1 : 0) << '\n';
        }
    }

    json config = model_config(s);
    config["grid-beta1"] = s.grid_beta1;
    config["scan-points"] = s.scan_points;
    config["overlay"] = s.overlay;
    json record = base_record("bifurcate", config);
    record["critical_beta1"] = stability::critical_beta1(params.score_kind, s.n, s.m, s.alpha_p, s.alpha_s);
    json files = {"branches.csv", "branches_gamma.csv"};

    if (s.overlay) {
        config["overlay-lambda"] = s.overlay_lambda;
        config["overlay-steps"] = s.overlay_steps;
        config["window"] = s.window;
        config["init"] = s.init;
        record["config"] = config;
        const Matrix a0 = initial_state(s);
        std::vector<Vector> means(grid.size());
        parallel_for(grid.size(), [&](std::size_t g) {
            core::ModelParams p = params;
            p.lambda = s.overlay_lambda;
            p.beta(0) = grid[g];
            p.seed = mix_seed(params.seed, g);
            const auto traj = sim::run(p, a0, s.overlay_steps);
            means[g] = sim::mean_rank(traj, s.window);
        });
        auto out = open_out(dir / "overlay.csv");
        out << "beta1,rank,gamma\n";
        for (std::size_t g = 0; g < grid.size(); ++g) {
            std::vector<double> sorted(means[g].data(), means[g].data() + means[g].size());
            std::sort(sorted.begin(), sorted.end(), std::greater<>());
            for (std::size_t r = 0; r < sorted.size(); ++r)
                out << report::format_double(grid[g]) << ',' << r << ',' << report::format_double(sorted[r]) << '\n';
        }
        files.push_back("overlay.csv");
        record["overlay_seed_rule"] = "mix_seed(seed, grid_index)";
    }
    record["files"] = files;
    write_json(dir / "run.json", record);
    return 0;
}

inference::FitOptions fit_options(const Settings& s) {
    if (s.restarts < 1)
        throw ConfigError("--restarts must be at least 1");
    inference::FitOptions options;
    options.likelihood.alpha_p = s.alpha_p;
    options.likelihood.alpha_s = s.alpha_s;
    options.likelihood.mask_diagonal = s.mask_diagonal;
    options.lambda_starts.clear();
    for (int r = 0; r < s.restarts; ++r)
        options.lambda_starts.push_back((2.0 * r + 1.0) / (2.0 * s.restarts));
    return options;
}

inference::InteractionSequence load_sequence(const Settings& s) {
    if (s.data.empty())
        throw ConfigError("--data is required");
    auto seq = data::load_edge_list(s.data);
    if (!s.warm_start.empty())
        seq.a0 = aggregate_warm_start(s.warm_start, seq.node_labels);
    return seq;
}

json fit_config(const Settings& s) {
    json config{{"data", s.data},
                {"dataset", s.dataset},
                {"restarts", s.restarts},
                {"alpha-p", s.alpha_p},
                {"alpha-s", s.alpha_s},
                {"mask-diagonal", s.mask_diagonal}};
    if (!s.warm_start.empty())
        config["warm-start"] = s.warm_start;
    return config;
}

std::string dataset_name(const Settings& s) {
    return s.dataset.empty() ? fs::path(s.data).stem().string() : s.dataset;
}

json sequence_summary(const inference::InteractionSequence& seq) {
    return json{{"n", seq.n()},
                {"periods", seq.periods()},
                {"first_period", seq.period_labels.front()},
                {"last_period", seq.period_labels.back()},
                {"m_bar", seq.mean_total()},
                {"initial_state", seq.a0 ? "warm-start" : "first period"}};
}

int cmd_fit(const Settings& s) {
    const auto seq = load_sequence(s);
    const auto kind = parse_score_kind(s.score);
    const auto options = fit_options(s);
    const fs::path dir = prepare_out(s.out);
    const auto result = inference::fit(seq, kind, options);
    const std::string name = dataset_name(s);
    const auto crit = inference::criticality_report(result, static_cast<int>(seq.n()), seq.mean_total(),
                                                    s.alpha_p, s.alpha_s);

    write_json(dir / "fit.json", report::fit_json(result));
    {
        auto out = open_out(dir / "table1.csv");
        report::write_table1_header(out);
        report::write_table1_row(name, result, out);
    }
    {
        auto out = open_out(dir / "criticality.csv");
        report::write_criticality_header(out);
        report::write_criticality_row(name, crit, out);
    }
    json config = fit_config(s);
    config["score"] = s.score;
    json record = base_record("fit", config);
    record["data_summary"] = sequence_summary(seq);
    record["files"] = {"fit.json", "table1.csv", "criticality.csv"};
    write_json(dir / "run.json", record);
    if (!result.diagnostics.warning.empty())
        std::cerr << "warning: " << result.diagnostics.warning << '\n';
    return 0;
}

int cmd_compare(const Settings& s) {
    const auto seq = load_sequence(s);
    std::vector<ScoreKind> kinds;
    for (const auto& name : s.scores)
        kinds.push_back(parse_score_kind(name));
    const auto options = fit_options(s);
    const fs::path dir = prepare_out(s.out);
    const auto rows = inference::compare_scores(seq, kinds, options);
    const std::string name = dataset_name(s);

    json fits = json::array();
    bool failed = false;
    auto table = open_out(dir / "table1.csv");
    auto crit_out = open_out(dir / "criticality.csv");
    report::write_table1_header(table);
    report::write_criticality_header(crit_out);
    for (const auto& row : rows) {
        json entry{{"score", std::string(to_string(row.kind))}, {"best", row.best}};
        if (row.result) {
            entry["fit"] = report::fit_json(*row.result);
            report::write_table1_row(name, *row.result, table);
            const auto crit = inference::criticality_report(*row.result, static_cast<int>(seq.n()),
                                                            seq.mean_total(), s.alpha_p, s.alpha_s);
            report::write_criticality_row(name, crit, crit_out);
        } else {
            entry["error"] = row.error;
            std::cerr << "error: " << to_string(row.kind) << ": " << row.error << '\n';
            failed = true;
        }
        fits.push_back(std::move(entry));
    }
    write_json(dir / "fits.json", fits);
    json config = fit_config(s);
    config["scores"] = s.scores;
    json record = base_record("compare", config);
    record["data_summary"] = sequence_summary(seq);
    record["files"] = {"fits.json", "table1.csv", "criticality.csv"};
    write_json(dir / "run.json", record);
    return failed ? 1 : 0;
}

int cmd_convert(const Settings& s) {
    if (s.input.empty())
        throw ConfigError("--input is required");
    std::ifstream in(s.input);
    if (!in)
        throw IoError("cannot open " + s.input);

    inference::InteractionSequence seq;
    if (s.format == "rankings") {
        seq = data::convert_rankings_topk(data::read_rankings(in), s.k);
    } else if (s.format == "placements") {
        data::PlacementDirection dir;
        if (s.direction == "hiring-to-degree")
            dir = data::PlacementDirection::HiringToDegree;
        else if (s.direction == "degree-to-hiring")
            dir = data::PlacementDirection::DegreeToHiring;
        else
            throw ConfigError("--direction must be hiring-to-degree or degree-to-hiring");
        seq = data::convert_placements(data::read_placements(in), dir);
    } else if (s.format == "contests") {
        seq = data::convert_contests(data::read_contests(in));
    } else if (s.format == "edges") {
        seq = data::read_edge_list(in);
    } else {
        throw ConfigError("--format must be rankings, placements, contests or edges");
    }

    if (s.top > 0) {
        data::PeriodWindow window{0, seq.periods()};
        if (!s.from.empty() || !s.to.empty())
            window = data::window_between(seq, s.from.empty() ? seq.period_labels.front() : s.from,
                                          s.to.empty() ? seq.period_labels.back() : s.to);
        seq = data::restrict_top_placers(seq, static_cast<std::size_t>(s.top), window);
    }

    const fs::path dir = prepare_out(s.out);
    {
        auto out = open_out(dir / "edges.csv");
        data::write_edge_list(seq, out);
    }
    json config{{"format", s.format}, {"input", s.input}, {"k", s.k}, {"direction", s.direction}, {"top", s.top}};
    if (!s.from.empty())
        config["from"] = s.from;
    if (!s.to.empty())
        config["to"] = s.to;
    json record = base_record("convert", config);
    record["data_summary"] = sequence_summary(seq);
    record["files"] = {"edges.csv"};
    write_json(dir / "run.json", record);
    return 0;
}

int cmd_critical(const Settings& s) {
    const auto kind = parse_score_kind(s.score);
    std::cout << report::format_double(stability::critical_beta1(kind, s.n, s.m, s.alpha_p, s.alpha_s)) << '\n';
    return 0;
}

// ---------------------------------------------------------------- option wiring

void add_model_options(CLI::App* sub, Settings& s) {
    sub->add_option("--score", s.score, "rootdegree, pagerank or springrank")->capture_default_str();
    sub->add_option("--n", s.n, "number of nodes")->capture_default_str();
    sub->add_option("--m", s.m, "endorsements per step")->capture_default_str();
    sub->add_option("--lambda", s.lambda, "memory parameter")->capture_default_str();
    sub->add_option("--beta1", s.beta1, "preference for prestige")->capture_default_str();
    sub->add_option("--beta2", s.beta2, "preference for proximity")->capture_default_str();
    sub->add_option("--seed", s.seed, "random seed")->capture_default_str();
    sub->add_option("--alpha-p", s.alpha_p, "PageRank teleportation")->capture_default_str();
    sub->add_option("--alpha-s", s.alpha_s, "SpringRank regularization")->capture_default_str();
    sub->add_flag("--mask-diagonal", s.mask_diagonal, "exclude self-endorsements");
}

void add_sim_options(CLI::App* sub, Settings& s) {
    sub->add_option("--steps", s.steps, "time steps")->capture_default_str();
    sub->add_option("--init", s.init, "initial state: uniform or random")->capture_default_str();
    sub->add_option("--warm-start", s.warm_start, "initial state from an edge list or labeled matrix");
    sub->add_option("--window", s.window, "final steps used for summaries")->capture_default_str();
}

void add_fit_options(CLI::App* sub, Settings& s) {
    sub->add_option("--data", s.data, "interchange CSV (period,source,target,count)");
    sub->add_option("--dataset", s.dataset, "dataset name for tables (default: file stem)");
    sub->add_option("--warm-start", s.warm_start, "pre-window interactions aggregated into A(0)");
    sub->add_option("--restarts", s.restarts, "lambda restarts")->capture_default_str();
    sub->add_option("--alpha-p", s.alpha_p, "PageRank teleportation")->capture_default_str();
    sub->add_option("--alpha-s", s.alpha_s, "SpringRank regularization")->capture_default_str();
    sub->add_flag("--mask-diagonal", s.mask_diagonal, "exclude self-endorsements");
}

void add_common(CLI::App* sub, Settings& s, bool needs_out) {
    sub->add_option("--config", "key=value file or a previous run.json");
    if (needs_out)
        sub->add_option("--out", s.out, "output directory")->required();
}

// Moves --config out of argv and splices its entries in front of the remaining flags.
std::vector<std::string> expand_config(int argc, char** argv, CLI::App& app) {
    std::vector<std::string> args(argv + 1, argv + argc);
    std::string config_path;
    std::vector<std::string> rest;
    for (std::size_t i = 0; i < args.size(); ++i) {
        if (args[i] == "--config") {
            if (i + 1 >= args.size())
                throw CLI::ArgumentMismatch("--config needs a path");
            config_path = args[++i];
        } else if (args[i].rfind("--config=", 0) == 0) {
            config_path = args[i].substr(9);
        } else {
            rest.push_back(args[i]);
        }
    }
    if (config_path.empty() || rest.empty())
        return rest;
    CLI::App* sub = nullptr;
    try {
        sub = app.get_subcommand(rest.front());
    } catch (const CLI::OptionNotFound&) {
        return rest;
    }
    std::vector<std::string> spliced{rest.front()};
    for (const auto& entry : read_config(config_path)) {
        if (entry.key == "config")
            continue;
        const std::string flag = "--" + entry.key;
        const bool overridden = std::any_of(rest.begin() + 1, rest.end(), [&](const std::string& a) {
            return a == flag || a.rfind(flag + "=", 0) == 0;
        });
        if (overridden)
            continue;
        const CLI::Option* opt = sub->get_option_no_throw(flag);
        if (!opt)
            throw ConfigError("unknown key '" + entry.key + "' in " + config_path +
                              (entry.line ? " (line " + std::to_string(entry.line) + ")" : ""));
        if (opt->get_expected_max() > 1) {
            std::stringstream ss(entry.value);
            std::string item;
            spliced.push_back(flag);
            while (std::getline(ss, item, ','))
                spliced.push_back(item);
        } else {
            spliced.push_back(flag + "=" + entry.value);
        }
    }
    spliced.insert(spliced.end(), rest.begin() + 1, rest.end());
    return spliced;
}

} // namespace

int main(int argc, char** argv) {
    CLI::App app{"Endorsement dynamics: simulation, long-memory stability analysis and maximum-likelihood fits"};
    app.require_subcommand(1);
    app.option_defaults()->multi_option_policy(CLI::MultiOptionPolicy::TakeLast);
    app.set_version_flag("--version", kVersion);
    Settings s;

    auto* simulate = app.add_subcommand("simulate", "simulate a trajectory; writes trajectory.csv, "
                                                    "final_adjacency.csv, run.json");
    add_common(simulate, s, true);
    add_model_options(simulate, s);
    add_sim_options(simulate, s);
    simulate->add_flag("--full-json", s.full_json, "also write trajectory.json");

    auto* sweep = app.add_subcommand("sweep", "rank variance over a (beta1, beta2) grid; writes sweep.csv");
    add_common(sweep, s, true);
    add_model_options(sweep, s);
    add_sim_options(sweep, s);
    sweep->add_option("--grid-beta1", s.grid_beta1, "START:STOP:NUM")->required();
    sweep->add_option("--grid-beta2", s.grid_beta2, "START:STOP:NUM")->capture_default_str();

    auto* bifurcate = app.add_subcommand("bifurcate", "egalitarian and two-group equilibria over a beta1 grid");
    add_common(bifurcate, s, true);
    add_model_options(bifurcate, s);
    bifurcate->add_option("--grid-beta1", s.grid_beta1, "START:STOP:NUM")->required();
    bifurcate->add_option("--scan-points", s.scan_points, "root scan resolution")->capture_default_str();
    bifurcate->add_flag("--overlay", s.overlay, "also simulate long-run gamma at each grid point");
    bifurcate->add_option("--overlay-lambda", s.overlay_lambda)->capture_default_str();
    bifurcate->add_option("--overlay-steps", s.overlay_steps)->capture_default_str();
    bifurcate->add_option("--window", s.window, "final steps averaged in the overlay")->capture_default_str();
    bifurcate->add_option("--init", s.init, "overlay initial state: uniform or random")->capture_default_str();

    auto* fit = app.add_subcommand("fit", "maximum-likelihood fit of one score function");
    add_common(fit, s, true);
    add_fit_options(fit, s);
    fit->add_option("--score", s.score, "rootdegree, pagerank or springrank")->capture_default_str();

    auto* compare = app.add_subcommand("compare", "fit several score functions and compare likelihoods");
    add_common(compare, s, true);
    add_fit_options(compare, s);
    compare->add_option("--scores", s.scores, "score functions to compare")->expected(2, 3)->capture_default_str();

    auto* convert = app.add_subcommand("convert", "convert raw records to the interchange CSV (edges.csv)");
    add_common(convert, s, true);
    convert->add_option("--format", s.format, "rankings, placements, contests or edges")->required();
    convert->add_option("--input", s.input, "input CSV")->required();
    convert->add_option("--k", s.k, "top-k cutoff for rankings")->capture_default_str();
    convert->add_option("--direction", s.direction, "placements: hiring-to-degree or degree-to-hiring")
        ->capture_default_str();
    convert->add_option("--top", s.top, "keep the nodes receiving the most endorsements");
    convert->add_option("--from", s.from, "first period of the --top window");
    convert->add_option("--to", s.to, "last period of the --top window");

    auto* critical = app.add_subcommand("critical", "print the critical beta1 value");
    add_common(critical, s, false);
    critical->add_option("--score", s.score)->capture_default_str();
    critical->add_option("--n", s.n)->capture_default_str();
    critical->add_option("--m", s.m)->capture_default_str();
    critical->add_option("--alpha-p", s.alpha_p)->capture_default_str();
    critical->add_option("--alpha-s", s.alpha_s)->capture_default_str();

    try {
        std::vector<std::string> args = expand_config(argc, argv, app);
        std::reverse(args.begin(), args.end());
        app.parse(args);
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e);
        return code == 0 ? 0 : 2;
    } catch (const Error& e) {
        std::cerr << "error: " << e.what() << '\n';
        return 2;
    }

    try {
        if (simulate->parsed())
            return cmd_simulate(s);
        if (sweep->parsed())
            return cmd_sweep(s);
        if (bifurcate->parsed())
            return cmd_bifurcate(s);
        if (fit->parsed())
            return cmd_fit(s);
        if (compare->parsed())
            return cmd_compare(s);
        if (convert->parsed())
            return cmd_convert(s);
        if (critical->parsed())
            return cmd_critical(s);
    } catch (const NumericError& e) {
        std::cerr << "numeric error: " << e.what() << '\n';
        return 1;
    } catch (const Error& e) {
        std::cerr << "error: " << e.what() << '\n';
        return 2;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << '\n';
        return 1;
    }
    return 2;
}
