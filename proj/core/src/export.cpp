#include "billiards/export.hpp"

#include <charconv>
#include <cmath>
#include <limits>
#include <fstream>
#include <stdexcept>

namespace billiards {

namespace {

struct Row {
    Eigen::Vector2d chart;
    Eigen::Vector3d ambient;
};

Row row(const Eigen::Vector2d& p, const SpaceSpec& space) {
    Row r{p, Eigen::Vector3d::Constant(std::numeric_limits<double>::quiet_NaN())};
    if (1.0 + space.formula_sign() * p.squaredNorm() > 0.0) r.ambient = central_lift_up(GnomonicPoint{p}, space).coords;
    return r;
}

Row row(const Eigen::Vector3d& q, const SpaceSpec& space) {
    return {central_project_down(AmbientPoint{q}, space).coords, q};
}

void put(std::string& out, double v) {
    out += format_double(v);
}

void put_row(std::string& out, double t, const Row& r) {
    put(out, t);
    for (double v : {r.chart.x(), r.chart.y(), r.ambient.x(), r.ambient.y(), r.ambient.z()}) {
        out += ',';
        put(out, v);
    }
}

template <Chart C>
std::string trajectory(const TrajectoryRecord<C>& rec) {
    std::string out = "t,x1,x2,ax,ay,az,e_native,e_partner\n";
    for (const auto& s : rec.samples) {
        put_row(out, s.state.t, row(s.state.pos.coords, rec.space));
        out += ',';
        put(out, s.energies.e_native);
        out += ',';
        put(out, s.energies.e_partner);
        out += '\n';
    }
    return out;
}

template <Chart C>
std::string events(const TrajectoryRecord<C>& rec) {
    std::string out = "t,x1,x2,ax,ay,az,wall_index,d_e_native,d_e_partner\n";
    for (const auto& e : rec.events) {
        put_row(out, e.t, row(e.pos.coords, rec.space));
        out += ',' + std::to_string(e.wall_index) + ',';
        put(out, std::abs(e.after.e_native - e.before.e_native));
        out += ',';
        put(out, std::abs(e.after.e_partner - e.before.e_partner));
        out += '\n';
    }
    return out;
}

template <Chart C>
std::string integrals(const TrajectoryRecord<C>& rec) {
    std::string out = "t,e_native,e_partner,de_native,de_partner\n";
    if (rec.samples.empty()) return out;
    const EnergyPair e0 = rec.samples.front().energies;
    for (const auto& s : rec.samples) {
        put(out, s.state.t);
        for (double v : {s.energies.e_native, s.energies.e_partner, s.energies.e_native - e0.e_native,
                         s.energies.e_partner - e0.e_partner}) {
            out += ',';
            put(out, v);
        }
        out += '\n';
    }
    return out;
}

template <Chart C>
void export_all(const TrajectoryRecord<C>& rec, const std::filesystem::path& stem) {
    const std::string base = stem.string();
    write_text(base + ".trajectory.csv", trajectory(rec));
    write_text(base + ".events.csv", events(rec));
    write_text(base + ".integrals.csv", integrals(rec));
}

std::string orbit_csv(const RunResult& r) {
    std::string out = "case,pairing,max_deviation,source_level,partner_level,level_defect,source_shell_drift,"
                      "partner_shell_drift,t_span\n";
    for (std::size_t i = 0; i < r.orbits.size(); ++i) {
        const auto& o = r.orbits[i];
        out += std::to_string(i) + ',' + to_string(r.scenario.orbits[i].pairing);
        for (double v : {o.max_deviation, o.source_level, o.partner_level, o.level_defect, o.source_shell_drift,
                         o.partner_shell_drift, o.t_span}) {
            out += ',';
            put(out, v);
        }
        out += '\n';
    }
    return out;
}

std::string image_csv(const RunResult& r) {
    std::string out = "a,B,points,sphere_residual,factor_residual,measured_c,expected_c,fit_residual,g1_empty\n";
    for (const auto& m : r.images) {
        put(out, m.a);
        out += ',';
        put(out, m.B);
        out += ',' + std::to_string(m.points);
        for (double v : {m.sphere_residual, m.factor_residual, m.measured_c, m.expected_c, m.fit_residual}) {
            out += ',';
            put(out, v);
        }
        out += m.g1_empty ? ",1\n" : ",0\n";
    }
    return out;
}

}  // namespace

std::string format_double(double v) {
    char buf[64];
    auto res = std::to_chars(buf, buf + sizeof buf, v, std::chars_format::general, 17);
    return std::string(buf, res.ptr);
}

std::string trajectory_csv(const PlaneRecord& rec) { return trajectory(rec); }
std::string trajectory_csv(const CurvedRecord& rec) { return trajectory(rec); }
std::string events_csv(const PlaneRecord& rec) { return events(rec); }
std::string events_csv(const CurvedRecord& rec) { return events(rec); }
std::string integrals_csv(const PlaneRecord& rec) { return integrals(rec); }
std::string integrals_csv(const CurvedRecord& rec) { return integrals(rec); }

void export_plotdata(const PlaneRecord& rec, const std::filesystem::path& stem) { export_all(rec, stem); }
void export_plotdata(const CurvedRecord& rec, const std::filesystem::path& stem) { export_all(rec, stem); }

void write_text(const std::filesystem::path& path, const std::string& text) {
    std::ofstream out(path, std::ios::binary | std::ios::trunc);
    if (!out) throw std::runtime_error("cannot open " + path.string() + " for writing");
    out << text;
    out.flush();
    if (!out) throw std::runtime_error("write failed for " + path.string());
}

void write_run_outputs(const RunResult& r, const std::filesystem::path& dir) {
    std::error_code ec;
    std::filesystem::create_directories(dir, ec);
    if (ec) throw std::runtime_error("cannot create " + dir.string() + ": " + ec.message());
    const std::filesystem::path stem = dir / r.scenario.name;
    if (r.plane) export_plotdata(*r.plane, stem);
    if (r.curved) export_plotdata(*r.curved, stem);
    if (!r.orbits.empty()) write_text(stem.string() + ".orbits.csv", orbit_csv(r));
    if (!r.images.empty()) write_text(stem.string() + ".images.csv", image_csv(r));
    write_text(stem.string() + ".report.json", r.report.to_json() + "\n");
}

}  // namespace billiards
