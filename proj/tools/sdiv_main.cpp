// sdiv: command line front end for minimum divergence estimation in
// discrete parametric models. Subcommands: fit, table, are, simulate.

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <fstream>
#include <iostream>
#include <map>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>
#include <json.hpp>

#include "sdiv/asymptotics.hpp"
#include "sdiv/divergence.hpp"
#include "sdiv/errors.hpp"
#include "sdiv/estimation.hpp"
#include "sdiv/io.hpp"
#include "sdiv/models.hpp"
#include "sdiv/simulation.hpp"
#include "sdiv/version.hpp"

namespace {

using nlohmann::json;

constexpr int exit_ok = 0;
constexpr int exit_inadmissible = 2;
constexpr int exit_nonconvergence = 3;
constexpr int exit_io = 4;
constexpr int exit_bad_arguments = 5;

void print_manifest_text(std::ostream& os, const sdiv::RunManifest& m) {
    os << "# command: " << m.command << "\n";
    os << "# version: " << m.version << "\n";
    os << "# timestamp: " << m.timestamp << "\n";
    for (const auto& [key, value] : m.params)
        os << "# " << key << ": " << value << "\n";
    if (!m.dataset_checksum_hex.empty())
        os << "# data-checksum: " << m.dataset_checksum_hex << "\n";
}

json manifest_json(const sdiv::RunManifest& m) {
    json j;
    j["command"] = m.command;
    j["version"] = m.version;
    j["timestamp"] = m.timestamp;
    j["params"] = m.params;
    if (!m.dataset_checksum_hex.empty())
        j["dataset_checksum"] = m.dataset_checksum_hex;
    return j;
}

std::string csv_quote(const std::string& s) {
    std::string out = "\"";
    for (char c : s) {
        if (c == '"') out += "\"\"";
        else out += c;
    }
    out += "\"";
    return out;
}

std::string join_doubles(const std::vector<double>& v) {
    std::string s;
    for (std::size_t i = 0; i < v.size(); ++i) {
        if (i) s += ",";
        s += sdiv::render_double(v[i]);
    }
    return s;
}

// ------------------------------------------------------------- config ----

std::string trim_copy(const std::string& s) {
    const auto b = s.find_first_not_of(" \t\r");
    if (b == std::string::npos) return "";
    const auto e = s.find_last_not_of(" \t\r");
    return s.substr(b, e - b + 1);
}

// Reads a key=value config file into "--key value" argument pairs.
std::vector<std::string> config_file_args(const std::string& path) {
    std::ifstream in(path);
    if (!in)
        throw sdiv::parse_error("config file " + path + ": cannot open", 0);
    std::vector<std::string> out;
    std::string line;
    long long lineno = 0;
    while (std::getline(in, line)) {
        ++lineno;
        const std::string t = trim_copy(line);
        if (t.empty() || t[0] == '#') continue;
        const auto eq = t.find('=');
        if (eq == std::string::npos)
            throw sdiv::parse_error("config file " + path + " line " +
                                        std::to_string(lineno) +
                                        ": expected key=value",
                                    lineno);
        const std::string key = trim_copy(t.substr(0, eq));
        std::string value = trim_copy(t.substr(eq + 1));
        if (key.empty())
            throw sdiv::parse_error("config file " + path + " line " +
                                        std::to_string(lineno) + ": empty key",
                                    lineno);
        if (value.size() >= 2 &&
            ((value.front() == '"' && value.back() == '"') ||
             (value.front() == '\'' && value.back() == '\'')))
            value = value.substr(1, value.size() - 2);
        out.push_back("--" + key);
        out.push_back(value);
    }
    return out;
}

// Replaces every "--config FILE" after the subcommand with the file's
// key=value pairs, inserted ahead of the explicit flags so the command line
// overrides the file (options use a last-one-wins policy).
std::vector<std::string> expand_config_args(int argc, char** argv) {
    std::vector<std::string> args(argv + 1, argv + argc);
    std::size_t sub = args.size();
    for (std::size_t i = 0; i < args.size(); ++i) {
        if (!args[i].empty() && args[i][0] != '-') {
            sub = i;
            break;
        }
    }
    if (sub == args.size()) return args;

    std::vector<std::string> expanded;
    std::vector<std::string> rest;
    for (std::size_t i = sub + 1; i < args.size(); ++i) {
        std::string file;
        if (args[i] == "--config" && i + 1 < args.size()) {
            file = args[++i];
        } else if (args[i].rfind("--config=", 0) == 0) {
            file = args[i].substr(9);
        } else {
            rest.push_back(args[i]);
            continue;
        }
        const auto pairs = config_file_args(file);
        expanded.insert(expanded.end(), pairs.begin(), pairs.end());
    }

    std::vector<std::string> out(args.begin(), args.begin() + sub + 1);
    out.insert(out.end(), expanded.begin(), expanded.end());
    out.insert(out.end(), rest.begin(), rest.end());
    return out;
}

// ---------------------------------------------------------------- fit ----

struct FitArgs {
    std::string model;
    std::string data_path;
    std::string data_format = "auto";
    double alpha = 0.0;
    double lambda = 0.0;
    std::string format = "text";
    int jobs = 1;
};

int run_fit(const FitArgs& args) {
    const sdiv::ModelSpec& model = sdiv::model_by_name(args.model);
    const sdiv::FrequencyTable data =
        sdiv::ingest(args.data_path, sdiv::data_format_from_string(args.data_format));
    const sdiv::DivergenceParams params =
        sdiv::make_divergence_params(args.alpha, args.lambda);

    sdiv::SolverOptions options;
    options.jobs = args.jobs;
    sdiv::FitResult result = sdiv::fit(data, model, params, options);
    try {
        result.std_error = sdiv::std_error(result, data, model, args.alpha);
    } catch (const std::exception&) {
        // reported as nan; the point estimate is still valid
    }

    const std::string checksum =
        sdiv::checksum_hex(sdiv::dataset_checksum(data));
    const sdiv::RunManifest manifest = sdiv::make_manifest(
        "fit",
        {{"model", args.model},
         {"alpha", sdiv::render_double(args.alpha)},
         {"lambda", sdiv::render_double(args.lambda)},
         {"data", args.data_path},
         {"data-format", args.data_format},
         {"format", args.format}},
        checksum);

    const double se = result.std_error.value_or(
        std::numeric_limits<double>::quiet_NaN());
    if (args.format == "json") {
        json j;
        j["manifest"] = manifest_json(manifest);
        j["result"] = {{"theta_hat", result.theta_hat},
                       {"std_error", se},
                       {"objective", result.objective},
                       {"grad_norm", result.grad_norm},
                       {"iterations", result.iterations},
                       {"seeds_tried", result.seeds_tried},
                       {"converged", result.converged},
                       {"n", data.n()}};
        std::cout << j.dump(2) << "\n";
    } else if (args.format == "csv") {
        print_manifest_text(std::cout, manifest);
        std::cout << "theta_hat,std_error,objective,grad_norm,iterations,"
                     "seeds_tried,n\n";
        std::cout << sdiv::render_double(result.theta_hat) << ","
                  << sdiv::render_double(se) << ","
                  << sdiv::render_double(result.objective) << ","
                  << sdiv::render_double(result.grad_norm) << ","
                  << result.iterations << "," << result.seeds_tried << ","
                  << data.n() << "\n";
    } else {
        print_manifest_text(std::cout, manifest);
        std::cout << "\n";
        std::cout << "theta_hat    " << sdiv::render_double(result.theta_hat)
                  << "\n";
        std::cout << "std_error    " << sdiv::render_double(se) << "\n";
        std::cout << "objective    " << sdiv::render_double(result.objective)
                  << "\n";
        std::cout << "grad_norm    " << sdiv::render_double(result.grad_norm)
                  << "\n";
        std::cout << "iterations   " << result.iterations << "\n";
        std::cout << "seeds_tried  " << result.seeds_tried << "\n";
        std::cout << "n            " << data.n() << "\n";
    }
    return exit_ok;
}

// -------------------------------------------------------------- table ----

struct TableArgs {
    std::string model;
    std::string data_path;
    std::string data_format = "auto";
    std::vector<double> alphas;
    std::vector<double> lambdas;
    std::string format = "text";
    int jobs = 1;
};

const char* cell_state_name(sdiv::CellState s) {
    switch (s) {
        case sdiv::CellState::Ok: return "ok";
        case sdiv::CellState::Inadmissible: return "inadmissible";
        case sdiv::CellState::NonConverged: return "nonconverged";
    }
    return "unknown";
}

int run_table(const TableArgs& args) {
    const sdiv::ModelSpec& model = sdiv::model_by_name(args.model);
    const sdiv::FrequencyTable data =
        sdiv::ingest(args.data_path, sdiv::data_format_from_string(args.data_format));

    std::vector<double> alphas = args.alphas;
    std::vector<double> lambdas = args.lambdas;
    if (alphas.empty()) alphas = {0, 0.1, 0.25, 0.4, 0.5, 0.6, 0.8, 1};
    if (lambdas.empty())
        lambdas = {-1, -0.7, -0.5, -0.3, -0.1, 0, 0.5, 1, 1.3, 1.5, 2};

    sdiv::SolverOptions options;
    options.jobs = args.jobs;
    const sdiv::GridResult grid =
        sdiv::fit_grid(data, model, alphas, lambdas, options);

    // Standard errors for converged cells (full-precision outputs only).
    std::vector<double> std_errors(grid.cells.size(),
                                   std::numeric_limits<double>::quiet_NaN());
    for (std::size_t i = 0; i < grid.cells.size(); ++i) {
        if (grid.cells[i].state != sdiv::CellState::Ok) continue;
        try {
            std_errors[i] = sdiv::std_error(
                grid.cells[i].result, data, model,
                alphas[i % alphas.size()]);
        } catch (const std::exception&) {
        }
    }

    const std::string checksum =
        sdiv::checksum_hex(sdiv::dataset_checksum(data));
    const sdiv::RunManifest manifest = sdiv::make_manifest(
        "table",
        {{"model", args.model},
         {"data", args.data_path},
         {"data-format", args.data_format},
         {"grid-alphas", join_doubles(alphas)},
         {"grid-lambdas", join_doubles(lambdas)},
         {"format", args.format}},
        checksum);

    const int decimals = model.name == "geometric" ? 4 : 2;

    if (args.format == "json") {
        json j;
        j["manifest"] = manifest_json(manifest);
        j["alphas"] = alphas;
        j["lambdas"] = lambdas;
        json cells = json::array();
        for (std::size_t row = 0; row < lambdas.size(); ++row) {
            for (std::size_t col = 0; col < alphas.size(); ++col) {
                const sdiv::GridCell& cell = grid.cell(row, col);
                json c;
                c["lambda"] = lambdas[row];
                c["alpha"] = alphas[col];
                c["state"] = cell_state_name(cell.state);
                if (cell.state == sdiv::CellState::Ok) {
                    c["theta_hat"] = cell.result.theta_hat;
                    c["objective"] = cell.result.objective;
                    c["grad_norm"] = cell.result.grad_norm;
                    c["iterations"] = cell.result.iterations;
                    const double se = std_errors[row * alphas.size() + col];
                    if (!std::isnan(se)) c["std_error"] = se;
                } else {
                    c["message"] = cell.message;
                }
                cells.push_back(c);
            }
        }
        j["cells"] = cells;
        std::cout << j.dump(2) << "\n";
    } else if (args.format == "csv") {
        print_manifest_text(std::cout, manifest);
        std::cout << "lambda,alpha,state,theta_hat,objective,grad_norm,"
                     "iterations,std_error,message\n";
        for (std::size_t row = 0; row < lambdas.size(); ++row) {
            for (std::size_t col = 0; col < alphas.size(); ++col) {
                const sdiv::GridCell& cell = grid.cell(row, col);
                std::cout << sdiv::render_double(lambdas[row]) << ","
                          << sdiv::render_double(alphas[col]) << ","
                          << cell_state_name(cell.state) << ",";
                if (cell.state == sdiv::CellState::Ok) {
                    const double se = std_errors[row * alphas.size() + col];
                    std::cout << sdiv::render_double(cell.result.theta_hat)
                              << ","
                              << sdiv::render_double(cell.result.objective)
                              << ","
                              << sdiv::render_double(cell.result.grad_norm)
                              << "," << cell.result.iterations << ","
                              << sdiv::render_double(se) << ",\"\"";
                } else {
                    std::cout << ",,,,," << csv_quote(cell.message);
                }
                std::cout << "\n";
            }
        }
    } else {
        print_manifest_text(std::cout, manifest);
        std::cout << "\n";
        // Header: lambda down the side, alpha across the top.
        std::vector<std::string> header{"lambda\\alpha"};
        for (double a : alphas) header.push_back(sdiv::render_double(a));
        std::vector<std::vector<std::string>> rows;
        for (std::size_t row = 0; row < lambdas.size(); ++row) {
            std::vector<std::string> r{sdiv::render_double(lambdas[row])};
            for (std::size_t col = 0; col < alphas.size(); ++col) {
                const sdiv::GridCell& cell = grid.cell(row, col);
                if (cell.state == sdiv::CellState::Ok)
                    r.push_back(
                        sdiv::render_fixed(cell.result.theta_hat, decimals));
                else if (cell.state == sdiv::CellState::Inadmissible)
                    r.push_back("--");
                else
                    r.push_back("nc");
            }
            rows.push_back(std::move(r));
        }
        std::vector<std::size_t> width(header.size(), 0);
        for (std::size_t c = 0; c < header.size(); ++c) {
            width[c] = header[c].size();
            for (const auto& r : rows) width[c] = std::max(width[c], r[c].size());
        }
        auto print_row = [&](const std::vector<std::string>& r) {
            for (std::size_t c = 0; c < r.size(); ++c) {
                if (c) std::cout << "  ";
                std::cout << std::string(width[c] - r[c].size(), ' ') << r[c];
            }
            std::cout << "\n";
        };
        print_row(header);
        for (const auto& r : rows) print_row(r);
    }
    return exit_ok;
}

// ---------------------------------------------------------------- are ----

struct AreArgs {
    std::string model;
    std::vector<double> thetas;
    std::vector<double> alphas;
    std::string format = "text";
};

int run_are(const AreArgs& args) {
    const sdiv::ModelSpec& model = sdiv::model_by_name(args.model);
    std::vector<double> alphas = args.alphas;
    if (alphas.empty()) alphas = {0, 0.05, 0.1, 0.3, 0.5, 0.7, 1};

    const sdiv::RunManifest manifest = sdiv::make_manifest(
        "are",
        {{"model", args.model},
         {"theta", join_doubles(args.thetas)},
         {"grid-alphas", join_doubles(alphas)},
         {"format", args.format}});

    std::vector<sdiv::AsymptoticReport> reports;
    for (double theta : args.thetas)
        for (double alpha : alphas)
            reports.push_back(sdiv::asymptotic_report(model, theta, alpha));

    const bool geometric = model.name == "geometric";
    auto closed_J = [&](const sdiv::AsymptoticReport& r) {
        return sdiv::geometric_J_closed(r.theta, r.alpha);
    };
    auto closed_V = [&](const sdiv::AsymptoticReport& r) {
        return sdiv::geometric_V_closed(r.theta, r.alpha);
    };

    if (args.format == "json") {
        json j;
        j["manifest"] = manifest_json(manifest);
        json rows = json::array();
        for (const auto& r : reports) {
            json row = {{"theta", r.theta},       {"alpha", r.alpha},
                        {"are_percent", r.are_percent},
                        {"sandwich", r.sandwich}, {"fisher", r.fisher},
                        {"J", r.J},               {"V", r.V},
                        {"xi", r.xi}};
            if (geometric) {
                row["J_closed"] = closed_J(r);
                row["V_closed"] = closed_V(r);
                row["xi_closed"] = sdiv::geometric_xi_closed(r.theta, r.alpha);
            }
            rows.push_back(row);
        }
        j["rows"] = rows;
        std::cout << j.dump(2) << "\n";
    } else if (args.format == "csv") {
        print_manifest_text(std::cout, manifest);
        std::cout << "theta,alpha,are_percent,sandwich,fisher,J,V,xi,"
                     "J_closed,V_closed,xi_closed\n";
        for (const auto& r : reports) {
            std::cout << sdiv::render_double(r.theta) << ","
                      << sdiv::render_double(r.alpha) << ","
                      << sdiv::render_double(r.are_percent) << ","
                      << sdiv::render_double(r.sandwich) << ","
                      << sdiv::render_double(r.fisher) << ","
                      << sdiv::render_double(r.J) << ","
                      << sdiv::render_double(r.V) << ","
                      << sdiv::render_double(r.xi) << ",";
            if (geometric)
                std::cout << sdiv::render_double(closed_J(r)) << ","
                          << sdiv::render_double(closed_V(r)) << ","
                          << sdiv::render_double(
                                 sdiv::geometric_xi_closed(r.theta, r.alpha));
            else
                std::cout << ",,";
            std::cout << "\n";
        }
    } else {
        print_manifest_text(std::cout, manifest);
        std::cout << "\n";
        std::vector<std::string> header{"theta"};
        for (double a : alphas)
            header.push_back("alpha=" + sdiv::render_double(a));
        std::vector<std::vector<std::string>> rows;
        std::size_t idx = 0;
        for (double theta : args.thetas) {
            std::vector<std::string> r{sdiv::render_double(theta)};
            for (std::size_t c = 0; c < alphas.size(); ++c)
                r.push_back(
                    sdiv::render_fixed(reports[idx + c].are_percent, 2));
            idx += alphas.size();
            rows.push_back(std::move(r));
        }
        std::vector<std::size_t> width(header.size(), 0);
        for (std::size_t c = 0; c < header.size(); ++c) {
            width[c] = header[c].size();
            for (const auto& r : rows) width[c] = std::max(width[c], r[c].size());
        }
        auto print_row = [&](const std::vector<std::string>& r) {
            for (std::size_t c = 0; c < r.size(); ++c) {
                if (c) std::cout << "  ";
                std::cout << std::string(width[c] - r[c].size(), ' ') << r[c];
            }
            std::cout << "\n";
        };
        print_row(header);
        for (const auto& r : rows) print_row(r);
    }
    return exit_ok;
}

// ----------------------------------------------------------- simulate ----

struct SimulateArgs {
    std::string plan_path;
    std::optional<std::uint64_t> seed_override;
    std::string format = "text";
    int jobs = 1;
};

struct ParsedPlan {
    sdiv::SimPlan plan;
    bool lambda_given = false;
    std::string check;                 // "" or "lambda_independence"
    std::vector<double> check_lambdas;
};

ParsedPlan parse_plan_file(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw sdiv::parse_error("cannot open plan file '" + path + "'", 0);

    ParsedPlan parsed;
    bool model_set = false, theta_set = false, n_set = false, reps_set = false,
         alpha_set = false;
    std::optional<double> epsilon;
    std::optional<std::int64_t> location;

    auto trim = [](std::string s) {
        const char* ws = " \t";
        const auto b = s.find_first_not_of(ws);
        if (b == std::string::npos) return std::string();
        const auto e = s.find_last_not_of(ws);
        return s.substr(b, e - b + 1);
    };

    std::string line;
    long long line_no = 0;
    while (std::getline(in, line)) {
        ++line_no;
        if (!line.empty() && line.back() == '\r') line.pop_back();
        const auto hash = line.find('#');
        if (hash != std::string::npos) line.erase(hash);
        if (trim(line).empty()) continue;
        const auto eq = line.find('=');
        if (eq == std::string::npos)
            throw sdiv::parse_error("expected key=value in plan file", line_no);
        const std::string key = trim(line.substr(0, eq));
        const std::string value = trim(line.substr(eq + 1));
        if (value.empty())
            throw sdiv::parse_error("empty value for '" + key + "'", line_no);

        auto as_double = [&](const std::string& v) {
            std::size_t pos = 0;
            double d = 0;
            try {
                d = std::stod(v, &pos);
            } catch (const std::exception&) {
                throw sdiv::parse_error("bad numeric value '" + v + "'", line_no);
            }
            if (pos != v.size())
                throw sdiv::parse_error("bad numeric value '" + v + "'", line_no);
            return d;
        };
        auto as_u64 = [&](const std::string& v) {
            std::size_t pos = 0;
            unsigned long long u = 0;
            try {
                u = std::stoull(v, &pos);
            } catch (const std::exception&) {
                throw sdiv::parse_error("bad integer value '" + v + "'", line_no);
            }
            if (pos != v.size())
                throw sdiv::parse_error("bad integer value '" + v + "'", line_no);
            return static_cast<std::uint64_t>(u);
        };

        if (key == "model") {
            parsed.plan.model = value;
            model_set = true;
        } else if (key == "theta") {
            parsed.plan.theta_true = as_double(value);
            theta_set = true;
        } else if (key == "n") {
            parsed.plan.n = static_cast<std::size_t>(as_u64(value));
            n_set = true;
        } else if (key == "replicates") {
            parsed.plan.replicates = static_cast<std::size_t>(as_u64(value));
            reps_set = true;
        } else if (key == "alpha") {
            parsed.plan.alpha = as_double(value);
            alpha_set = true;
        } else if (key == "lambda") {
            parsed.plan.lambda = as_double(value);
            parsed.lambda_given = true;
        } else if (key == "seed") {
            parsed.plan.seed = as_u64(value);
        } else if (key == "epsilon") {
            epsilon = as_double(value);
        } else if (key == "location") {
            location = static_cast<std::int64_t>(as_double(value));
        } else if (key == "check") {
            if (value != "lambda_independence")
                throw sdiv::parse_error("unknown check '" + value + "'", line_no);
            parsed.check = value;
        } else if (key == "lambdas") {
            std::stringstream ss(value);
            std::string tok;
            while (std::getline(ss, tok, ','))
                parsed.check_lambdas.push_back(as_double(trim(tok)));
        } else {
            throw sdiv::parse_error("unknown plan key '" + key + "'", line_no);
        }
    }

    if (!model_set || !theta_set || !n_set || !reps_set || !alpha_set)
        throw sdiv::parse_error(
            "plan file must set model, theta, n, replicates and alpha", line_no);
    if (epsilon.has_value() != location.has_value())
        throw sdiv::parse_error(
            "contamination needs both epsilon and location", line_no);
    if (epsilon) {
        sdiv::Contamination c;
        c.epsilon = *epsilon;
        c.location = *location;
        parsed.plan.contamination = c;
    }
    if (parsed.check.empty() && !parsed.lambda_given)
        throw sdiv::parse_error("plan file must set lambda", line_no);
    if (!parsed.check.empty() && parsed.check_lambdas.size() < 2)
        throw sdiv::parse_error(
            "check = lambda_independence needs a lambdas list", line_no);
    return parsed;
}

int run_simulate(const SimulateArgs& args) {
    ParsedPlan parsed = parse_plan_file(args.plan_path);
    if (args.seed_override) parsed.plan.seed = *args.seed_override;
    const sdiv::SimPlan& plan = parsed.plan;

    std::map<std::string, std::string> params{
        {"plan", args.plan_path},
        {"model", plan.model},
        {"theta", sdiv::render_double(plan.theta_true)},
        {"n", std::to_string(plan.n)},
        {"replicates", std::to_string(plan.replicates)},
        {"alpha", sdiv::render_double(plan.alpha)},
        {"seed", std::to_string(plan.seed)},
        {"format", args.format}};
    if (plan.contamination) {
        params["epsilon"] = sdiv::render_double(plan.contamination->epsilon);
        params["location"] = std::to_string(plan.contamination->location);
    }

    if (!parsed.check.empty()) {
        params["check"] = parsed.check;
        params["lambdas"] = join_doubles(parsed.check_lambdas);
        const sdiv::RunManifest manifest =
            sdiv::make_manifest("simulate", params);

        const sdiv::LambdaIndependenceCheck check =
            sdiv::lambda_independence_check(
                sdiv::model_by_name(plan.model), plan.theta_true, plan.n,
                plan.replicates, plan.alpha, parsed.check_lambdas, plan.seed,
                args.jobs);

        if (args.format == "json") {
            json j;
            j["manifest"] = manifest_json(manifest);
            j["lambdas"] = check.lambdas;
            j["variances_scaled"] = check.variances;
            j["max_pairwise_diff"] = check.max_pairwise_diff;
            j["noise_band"] = check.noise_band;
            j["within_band"] = check.within_band;
            std::cout << j.dump(2) << "\n";
        } else if (args.format == "csv") {
            print_manifest_text(std::cout, manifest);
            std::cout << "lambda,empirical_var_scaled,max_pairwise_diff,"
                         "noise_band,within_band\n";
            for (std::size_t i = 0; i < check.lambdas.size(); ++i)
                std::cout << sdiv::render_double(check.lambdas[i]) << ","
                          << sdiv::render_double(check.variances[i]) << ","
                          << sdiv::render_double(check.max_pairwise_diff) << ","
                          << sdiv::render_double(check.noise_band) << ","
                          << (check.within_band ? "yes" : "no") << "\n";
        } else {
            print_manifest_text(std::cout, manifest);
            std::cout << "\n";
            std::cout << "lambda  empirical_var_scaled\n";
            for (std::size_t i = 0; i < check.lambdas.size(); ++i)
                std::cout << sdiv::render_double(check.lambdas[i]) << "  "
                          << sdiv::render_double(check.variances[i]) << "\n";
            std::cout << "\nmax_pairwise_diff  "
                      << sdiv::render_double(check.max_pairwise_diff) << "\n";
            std::cout << "noise_band         "
                      << sdiv::render_double(check.noise_band) << "\n";
            std::cout << "within_band        "
                      << (check.within_band ? "yes" : "no") << "\n";
        }
        return exit_ok;
    }

    params["lambda"] = sdiv::render_double(plan.lambda);
    const sdiv::RunManifest manifest = sdiv::make_manifest("simulate", params);
    const sdiv::SimReport report = sdiv::run_plan(plan, args.jobs);
    const double ratio =
        report.empirical_var_scaled / report.theoretical_sandwich;

    if (args.format == "json") {
        json j;
        j["manifest"] = manifest_json(manifest);
        j["report"] = {
            {"replicates", plan.replicates},
            {"failures", report.failures},
            {"mean_theta_hat", report.mean_theta_hat},
            {"sd_theta_hat", report.sd_theta_hat},
            {"bias", report.bias},
            {"empirical_var_scaled", report.empirical_var_scaled},
            {"theoretical_sandwich", report.theoretical_sandwich},
            {"variance_ratio", ratio},
            {"normality_a2", report.normality.a2},
            {"normality_a2_modified", report.normality.a2_mod},
            {"normality_p_value", report.normality.p_value}};
        std::cout << j.dump(2) << "\n";
    } else if (args.format == "csv") {
        print_manifest_text(std::cout, manifest);
        std::cout << "replicates,failures,mean_theta_hat,sd_theta_hat,bias,"
                     "empirical_var_scaled,theoretical_sandwich,variance_ratio,"
                     "normality_a2,normality_a2_modified,normality_p_value\n";
        std::cout << plan.replicates << "," << report.failures << ","
                  << sdiv::render_double(report.mean_theta_hat) << ","
                  << sdiv::render_double(report.sd_theta_hat) << ","
                  << sdiv::render_double(report.bias) << ","
                  << sdiv::render_double(report.empirical_var_scaled) << ","
                  << sdiv::render_double(report.theoretical_sandwich) << ","
                  << sdiv::render_double(ratio) << ","
                  << sdiv::render_double(report.normality.a2) << ","
                  << sdiv::render_double(report.normality.a2_mod) << ","
                  << sdiv::render_double(report.normality.p_value) << "\n";
    } else {
        print_manifest_text(std::cout, manifest);
        std::cout << "\n";
        std::cout << "replicates             " << plan.replicates << "\n";
        std::cout << "failures               " << report.failures << "\n";
        std::cout << "mean_theta_hat         "
                  << sdiv::render_double(report.mean_theta_hat) << "\n";
        std::cout << "sd_theta_hat           "
                  << sdiv::render_double(report.sd_theta_hat) << "\n";
        std::cout << "bias                   "
                  << sdiv::render_double(report.bias) << "\n";
        std::cout << "empirical_var_scaled   "
                  << sdiv::render_double(report.empirical_var_scaled) << "\n";
        std::cout << "theoretical_sandwich   "
                  << sdiv::render_double(report.theoretical_sandwich) << "\n";
        std::cout << "variance_ratio         " << sdiv::render_double(ratio)
                  << "\n";
        std::cout << "normality_a2           "
                  << sdiv::render_double(report.normality.a2) << "\n";
        std::cout << "normality_a2_modified  "
                  << sdiv::render_double(report.normality.a2_mod) << "\n";
        std::cout << "normality_p_value      "
                  << sdiv::render_double(report.normality.p_value) << "\n";
    }
    return exit_ok;
}

} // namespace

int main(int argc, char** argv) {
    CLI::App app{"minimum divergence estimation for discrete models"};
    app.set_version_flag("--version", sdiv::version_string);
    app.require_subcommand(1);
    // config files are expanded into leading flags, so repeated options must
    // resolve to the one given last (explicit flags win over the file)
    app.option_defaults()->multi_option_policy(CLI::MultiOptionPolicy::TakeLast);
    const std::string config_help =
        "key=value file supplying defaults; explicit flags override";
    std::string config_dummy;

    FitArgs fit_args;
    CLI::App* fit_cmd =
        app.add_subcommand("fit", "fit one (alpha, lambda) estimator to data");
    fit_cmd->add_option("--model", fit_args.model, "poisson or geometric")
        ->required();
    fit_cmd->add_option("--data", fit_args.data_path, "dataset file")
        ->required();
    fit_cmd->add_option("--data-format", fit_args.data_format,
                        "auto, freq or raw");
    fit_cmd->add_option("--alpha", fit_args.alpha, "density power exponent");
    fit_cmd->add_option("--lambda", fit_args.lambda, "family mixing parameter");
    fit_cmd->add_option("--format", fit_args.format, "text, csv or json")
        ->check(CLI::IsMember({"text", "csv", "json"}));
    fit_cmd->add_option("--jobs", fit_args.jobs, "worker threads");
    fit_cmd->add_option("--config", config_dummy, config_help);

    TableArgs table_args;
    CLI::App* table_cmd =
        app.add_subcommand("table", "fit a whole (lambda, alpha) grid");
    table_cmd->add_option("--model", table_args.model, "poisson or geometric")
        ->required();
    table_cmd->add_option("--data", table_args.data_path, "dataset file")
        ->required();
    table_cmd->add_option("--data-format", table_args.data_format,
                          "auto, freq or raw");
    table_cmd->add_option("--grid-alphas", table_args.alphas,
                          "comma separated alpha values")
        ->delimiter(',');
    table_cmd->add_option("--grid-lambdas", table_args.lambdas,
                          "comma separated lambda values")
        ->delimiter(',');
    table_cmd->add_option("--format", table_args.format, "text, csv or json")
        ->check(CLI::IsMember({"text", "csv", "json"}));
    table_cmd->add_option("--jobs", table_args.jobs, "worker threads");
    table_cmd->add_option("--config", config_dummy, config_help);

    AreArgs are_args;
    CLI::App* are_cmd = app.add_subcommand(
        "are", "asymptotic relative efficiency table (model case)");
    are_cmd->add_option("--model", are_args.model, "poisson or geometric")
        ->required();
    are_cmd->add_option("--theta", are_args.thetas,
                        "comma separated parameter values")
        ->required()
        ->delimiter(',');
    are_cmd->add_option("--grid-alphas", are_args.alphas,
                        "comma separated alpha values")
        ->delimiter(',');
    are_cmd->add_option("--format", are_args.format, "text, csv or json")
        ->check(CLI::IsMember({"text", "csv", "json"}));
    are_cmd->add_option("--config", config_dummy, config_help);

    SimulateArgs simulate_args;
    std::uint64_t seed_value = 0;
    CLI::App* simulate_cmd = app.add_subcommand(
        "simulate", "Monte Carlo study driven by a plan file");
    simulate_cmd
        ->add_option("--plan", simulate_args.plan_path, "plan file (key=value)")
        ->required();
    CLI::Option* seed_opt = simulate_cmd->add_option(
        "--seed", seed_value, "override the plan seed");
    simulate_cmd
        ->add_option("--format", simulate_args.format, "text, csv or json")
        ->check(CLI::IsMember({"text", "csv", "json"}));
    simulate_cmd->add_option("--jobs", simulate_args.jobs, "worker threads");
    simulate_cmd->add_option("--config", config_dummy, config_help);

    std::vector<std::string> args;
    try {
        args = expand_config_args(argc, argv);
    } catch (const sdiv::parse_error& e) {
        std::cerr << "error: " << e.what() << "\n";
        return exit_io;
    }
    std::reverse(args.begin(), args.end());

    try {
        app.parse(std::move(args));
    } catch (const CLI::ParseError& e) {
        if (e.get_exit_code() == 0) return app.exit(e);  // --help/--version
        app.exit(e);
        return exit_bad_arguments;
    }

    try {
        if (fit_cmd->parsed()) return run_fit(fit_args);
        if (table_cmd->parsed()) return run_table(table_args);
        if (are_cmd->parsed()) return run_are(are_args);
        if (simulate_cmd->parsed()) {
            if (seed_opt->count() > 0) simulate_args.seed_override = seed_value;
            return run_simulate(simulate_args);
        }
    } catch (const sdiv::undefined_divergence& e) {
        std::cout << "--\n";
        std::cerr << "inadmissible: " << e.what() << "\n";
        return exit_inadmissible;
    } catch (const sdiv::nonconvergence_error& e) {
        std::cerr << "non-convergence: " << e.what() << "\n" << e.trace() << "\n";
        return exit_nonconvergence;
    } catch (const sdiv::parse_error& e) {
        std::cerr << "input error (line " << e.line() << "): " << e.what()
                  << "\n";
        return exit_io;
    } catch (const sdiv::domain_error& e) {
        std::cerr << "argument error: " << e.what() << "\n";
        return exit_bad_arguments;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 1;
    }
    return exit_bad_arguments;
}
