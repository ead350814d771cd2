#include "rtrace/report.hpp"

#include <algorithm>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <sstream>

#include "json.hpp"
#include "rtrace/errors.hpp"

namespace rtrace {
namespace {

namespace fs = std::filesystem;
using nlohmann::json;

std::string fmt(double v) {
    char buf[40];
    std::snprintf(buf, sizeof buf, "%.14e", v);  // 15 significant digits
    return buf;
}

int det_sign(double v) { return v > 0.0 ? 1 : (v < 0.0 ? -1 : 0); }

const char* termination_name(Termination t) {
    switch (t) {
        case Termination::lambda_bound: return "lambda_bound";
        case Termination::max_steps: return "max_steps";
        case Termination::solver_failure: return "solver_failure";
        case Termination::user_stop: return "user_stop";
    }
    return "?";
}

json event_json(int branch_id, const BifurcationEvent& ev) {
    json tangents = json::array();
    for (const auto& t : ev.tangents_out)
        tangents.push_back({t[0], t[1], t[2]});
    return json{{"branch_id", branch_id},
                {"lambda_t", ev.x_t[2]},
                {"re_k", ev.x_t[0]},
                {"im_k", ev.x_t[1]},
                {"tangents_out", tangents},
                {"det_before", ev.det_before},
                {"det_after", ev.det_after}};
}

json config_json(const StudyConfig& cfg) {
    json params = json::object();
    for (const auto& [name, value] : cfg.potential_params) params[name] = value;
    return json{{"potential", {{"kind", cfg.potential_kind}, {"params", params}}},
                {"l", cfg.l},
                {"grid", {{"r_end", cfg.grid_r_end}, {"n_points", cfg.grid_n_points}}},
                {"lambda", {{"min", cfg.lambda_min}, {"max", cfg.lambda_max}}},
                {"step",
                 {{"ds", cfg.step.ds},
                  {"ds_min", cfg.step.ds_min},
                  {"ds_max", cfg.step.ds_max},
                  {"newton_tol", cfg.step.newton_tol},
                  {"newton_max_iter", cfg.step.newton_max_iter},
                  {"max_steps", cfg.max_steps}}},
                {"im_k_floor", cfg.im_k_floor},
                {"output_dir", cfg.output_dir}};
}

void write_file(const fs::path& path, const std::string& content) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw IoError("cannot open '" + path.string() + "' for writing");
    out << content;
    if (!out) throw IoError("write failed for '" + path.string() + "'");
}

struct CsvPoint {
    double arclength, re_k, im_k, lambda, residual_norm;
    int det_sign;
};

std::vector<CsvPoint> read_branch_csv(const fs::path& path) {
    std::ifstream in(path);
    if (!in) throw IoError("cannot read '" + path.string() + "'");
    std::vector<CsvPoint> points;
    std::string line;
    std::getline(in, line);  // header
    while (std::getline(in, line)) {
        if (line.empty()) continue;
        std::replace(line.begin(), line.end(), ',', ' ');
        std::istringstream row(line);
        int branch_id, point_index;
        CsvPoint p{};
        std::string state;
        if (row >> branch_id >> point_index >> p.arclength >> p.re_k >> p.im_k >>
            p.lambda >> p.residual_norm >> p.det_sign >> state)
            points.push_back(p);
    }
    return points;
}

}  // namespace

std::string trajectory_csv(const TracedBranch& tb) {
    std::string out =
        "branch_id,point_index,arclength,re_k,im_k,lambda,residual_norm,det_sign,"
        "state_class\n";
    for (std::size_t i = 0; i < tb.branch.points.size(); ++i) {
        const auto& p = tb.branch.points[i];
        const StateClass cls = classify(Eigen::Vector3d(p.x[0], p.x[1], p.x[2]));
        out += std::to_string(tb.id) + "," + std::to_string(i) + "," +
               fmt(p.arclength) + "," + fmt(p.x[0]) + "," + fmt(p.x[1]) + "," +
               fmt(p.x[2]) + "," + fmt(p.residual_norm) + "," +
               std::to_string(det_sign(p.aug_det)) + "," + state_class_name(cls) + "\n";
    }
    return out;
}

void write_study_outputs(const std::string& dir, const StudyConfig& cfg,
                         const StudyResult& result) {
    std::error_code ec;
    fs::create_directories(dir, ec);
    if (ec) throw IoError("cannot create output directory '" + dir + "'");

    for (const auto& tb : result.branches)
        write_file(fs::path(dir) / ("branch_" + std::to_string(tb.id) + ".csv"),
                   trajectory_csv(tb));

    json events = json::array();
    for (const auto& tb : result.branches)
        for (const auto& ev : tb.branch.events) events.push_back(event_json(tb.id, ev));
    write_file(fs::path(dir) / "events.json", events.dump(2) + "\n");

    json branches = json::array();
    for (const auto& tb : result.branches) {
        json warnings = json::array();
        for (const auto& w : tb.branch.warnings) warnings.push_back(w);
        branches.push_back({{"id", tb.id},
                            {"parent_branch", tb.parent_branch},
                            {"parent_event", tb.parent_event},
                            {"seed_lambda", tb.seed_lambda},
                            {"seed_im_k", tb.seed_im_k},
                            {"points", tb.branch.points.size()},
                            {"events", tb.branch.events.size()},
                            {"termination", termination_name(tb.branch.termination)},
                            {"warnings", warnings}});
    }
    json failures = json::array();
    for (const auto& f : result.failures) failures.push_back(f);
    const json study{{"config", config_json(cfg)},
                     {"branches", branches},
                     {"failures", failures}};
    write_file(fs::path(dir) / "study.json", study.dump(2) + "\n");
}

void write_plot_data(const std::string& study_dir, const std::string& out_dir) {
    const fs::path src(study_dir);
    if (!fs::is_directory(src))
        throw ConfigError("'" + study_dir + "' is not a directory");

    std::vector<std::pair<int, fs::path>> branch_files;
    for (const auto& entry : fs::directory_iterator(src)) {
        const std::string name = entry.path().filename().string();
        if (name.rfind("branch_", 0) == 0 && entry.path().extension() == ".csv")
            branch_files.emplace_back(std::stoi(name.substr(7)), entry.path());
    }
    if (branch_files.empty())
        throw ConfigError("no branch_<id>.csv files in '" + study_dir + "'");
    std::sort(branch_files.begin(), branch_files.end());

    std::error_code ec;
    fs::create_directories(out_dir, ec);
    if (ec) throw IoError("cannot create plot directory '" + out_dir + "'");

    std::string kplane, imk_lambda, rek_lambda;
    for (const auto& [id, path] : branch_files) {
        const auto points = read_branch_csv(path);
        const std::string head = "# branch " + std::to_string(id) + "\n";
        kplane += head;
        imk_lambda += head;
        rek_lambda += head;
        for (const auto& p : points) {
            kplane += fmt(p.re_k) + " " + fmt(p.im_k) + "\n";
            imk_lambda += fmt(p.lambda) + " " + fmt(p.im_k) + "\n";
            rek_lambda += fmt(p.lambda) + " " + fmt(p.re_k) + "\n";
        }
        kplane += "\n\n";
        imk_lambda += "\n\n";
        rek_lambda += "\n\n";
    }
    write_file(fs::path(out_dir) / "kplane.dat", kplane);
    write_file(fs::path(out_dir) / "imk_lambda.dat", imk_lambda);
    write_file(fs::path(out_dir) / "rek_lambda.dat", rek_lambda);

    std::string events_dat = "# re_k im_k lambda\n";
    const fs::path events_path = src / "events.json";
    if (fs::exists(events_path)) {
        std::ifstream in(events_path);
        nlohmann::json events;
        try {
            in >> events;
        } catch (const std::exception& e) {
            throw ConfigError("cannot parse '" + events_path.string() + "': " + e.what());
        }
        for (const auto& ev : events)
            events_dat += fmt(ev.at("re_k").get<double>()) + " " +
                          fmt(ev.at("im_k").get<double>()) + " " +
                          fmt(ev.at("lambda_t").get<double>()) + "\n";
    }
    write_file(fs::path(out_dir) / "events.dat", events_dat);

    const std::string script =
        "# gnuplot script for the pole-trajectory projections\n"
        "set terminal pngcairo size 900,700\n"
        "set grid\n"
        "set output 'kplane.png'\n"
        "set xlabel 'Re k'\n"
        "set ylabel 'Im k'\n"
        "set zeroaxis\n"
        "plot 'kplane.dat' with lines notitle, \\\n"
        "     'events.dat' using 1:2 with points pt 7 ps 1.5 title 'bifurcations'\n"
        "set output 'imk_lambda.png'\n"
        "set xlabel 'lambda'\n"
        "set ylabel 'Im k'\n"
        "plot 'imk_lambda.dat' with lines notitle, \\\n"
        "     'events.dat' using 3:2 with points pt 7 ps 1.5 title 'bifurcations'\n"
        "set output 'rek_lambda.png'\n"
        "set xlabel 'lambda'\n"
        "set ylabel 'Re k'\n"
        "plot 'rek_lambda.dat' with lines notitle, \\\n"
        "     'events.dat' using 3:1 with points pt 7 ps 1.5 title 'bifurcations'\n";
    write_file(fs::path(out_dir) / "plot.gp", script);
}

}  // namespace rtrace
