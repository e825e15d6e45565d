// Plot-ready tables and their two serialisations: a whitespace-delimited text
// table and JSON lines with a metadata preamble.
#pragma once

#include <cmath>
#include <cstdint>
#include <cstdio>
#include <cstdlib>
#include <fstream>
#include <ostream>
#include <sstream>
#include <stdexcept>
#include <string>
#include <string_view>
#include <variant>
#include <vector>

#include "json.hpp"

#include "eqcm/scan.hpp"

namespace eqcm {

inline constexpr std::string_view kToolName = "eqcm";
inline constexpr std::string_view kToolVersion = "1.0.0";

enum class OutputFormat { table, jsonl };

inline std::string_view to_string(OutputFormat f) { return f == OutputFormat::table ? "table" : "jsonl"; }

using Cell = std::variant<double, std::int64_t, std::string>;

struct Table {
    std::vector<std::string> columns;
    std::vector<std::vector<Cell>> rows;
    /// Extra preamble fields for the structured format.
    nlohmann::ordered_json meta = nlohmann::ordered_json::object();

    void add_row(std::vector<Cell> row) {
        if (row.size() != columns.size()) {
            throw std::logic_error("Table::add_row: expected " + std::to_string(columns.size()) + " cells, got " +
                                   std::to_string(row.size()));
        }
        rows.push_back(std::move(row));
    }
};

/// 12 significant digits; "nan", "inf", "-inf" for non-finite values.
inline std::string format_number(double v) {
    if (std::isnan(v)) return "nan";
    if (std::isinf(v)) return v > 0 ? "inf" : "-inf";
    if (v == 0.0) v = 0.0;  // drop the sign of -0
    char buf[32];
    std::snprintf(buf, sizeof buf, "%.12g", v);
    return buf;
}

/// The value a reader of the text output recovers.
inline double rounded(double v) {
    if (!std::isfinite(v)) return v;
    return std::strtod(format_number(v).c_str(), nullptr);
}

inline std::string format_cell(const Cell& c) {
    if (const auto* d = std::get_if<double>(&c)) return format_number(*d);
    if (const auto* i = std::get_if<std::int64_t>(&c)) return std::to_string(*i);
    return std::get<std::string>(c);
}

inline void write_table(std::ostream& os, const Table& t) {
    for (std::size_t i = 0; i < t.columns.size(); ++i) os << (i ? " " : "") << t.columns[i];
    os << '\n';
    for (const auto& row : t.rows) {
        for (std::size_t i = 0; i < row.size(); ++i) os << (i ? " " : "") << format_cell(row[i]);
        os << '\n';
    }
}

inline nlohmann::ordered_json cell_to_json(const Cell& c) {
    if (const auto* d = std::get_if<double>(&c)) {
        if (!std::isfinite(*d)) return nullptr;
        return rounded(*d);
    }
    if (const auto* i = std::get_if<std::int64_t>(&c)) return *i;
    return std::get<std::string>(c);
}

inline void write_jsonl(std::ostream& os, const Table& t) {
    nlohmann::ordered_json meta{{"tool", kToolName}, {"version", kToolVersion}};
    meta.update(t.meta);
    meta["columns"] = t.columns;
    meta["rows"] = t.rows.size();
    os << nlohmann::ordered_json{{"meta", meta}}.dump() << '\n';
    for (const auto& row : t.rows) {
        nlohmann::ordered_json rec = nlohmann::ordered_json::object();
        for (std::size_t i = 0; i < row.size(); ++i) rec[t.columns[i]] = cell_to_json(row[i]);
        os << rec.dump() << '\n';
    }
}

inline void serialize(std::ostream& os, const Table& t, OutputFormat f) {
    if (f == OutputFormat::table) {
        write_table(os, t);
    } else {
        write_jsonl(os, t);
    }
}

inline std::string serialize(const Table& t, OutputFormat f) {
    std::ostringstream ss;
    serialize(ss, t, f);
    return ss.str();
}

struct IoError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

inline void write_file(const std::string& path, const std::string& bytes) {
    std::ofstream f(path, std::ios::binary | std::ios::trunc);
    if (!f) throw IoError("cannot open '" + path + "' for writing");
    f << bytes;
    f.flush();
    if (!f) throw IoError("write to '" + path + "' failed");
}

// ---------------------------------------------------------------------------
// Tables for the pipeline results
// ---------------------------------------------------------------------------

inline std::vector<std::string> param_columns() { return {"j1", "j2", "l1", "l2", "h"}; }

inline void append_params(std::vector<Cell>& row, const ModelParams& p) {
    row.insert(row.end(), {p.j1, p.j2, p.l1, p.l2, p.h});
}

/// Measure columns shared by `sweep` and `point`, in fixed order.
inline std::vector<std::string> measure_columns() {
    return {"mutual_info", "classical", "discord",          "concurrence",       "cxx",
            "cyy",         "czz",       "mz",               "gap",               "e0_per_site",
            "degenerate",  "mz_right",  "classical_closed", "classical_numeric", "optimizer_gap"};
}

inline void append_measures(std::vector<Cell>& row, const PointEvaluation& ev) {
    const double nan = std::numeric_limits<double>::quiet_NaN();
    const bool ok = ev.ok();
    for (Quantity q : kAllQuantities) row.emplace_back(ev.value(q));
    row.emplace_back(std::int64_t{ev.degenerate ? 1 : 0});
    row.emplace_back(ok ? ev.correlators.mz_right : nan);
    row.emplace_back(ok ? ev.measures.classical_closed : nan);
    row.emplace_back(ok ? ev.measures.classical_numeric : nan);
    row.emplace_back(ok ? ev.measures.optimizer_agreement : nan);
}

inline nlohmann::ordered_json params_json(const ModelParams& p) {
    return {{"j1", p.j1}, {"j2", p.j2}, {"l1", p.l1}, {"l2", p.l2}, {"h", p.h}, {"n_cells", p.n_cells}};
}

inline Table sweep_table(const SweepResult& r) {
    Table t;
    t.columns = {"t"};
    for (auto& c : param_columns()) t.columns.push_back(c);
    for (auto& c : measure_columns()) t.columns.push_back(c);
    for (const auto& s : r.samples) {
        std::vector<Cell> row{s.t};
        append_params(row, s.eval.params);
        append_measures(row, s.eval);
        t.add_row(std::move(row));
    }
    const auto& sp = r.spec;
    t.meta["kind"] = "sweep";
    t.meta["n_cells"] = sp.base.n_cells;
    t.meta["k_points"] = build_kgrid(sp.base.n_cells).size();
    t.meta["base"] = params_json(sp.base);
    t.meta["slope"] = sp.slope;
    t.meta["t_min"] = sp.t_min;
    t.meta["t_max"] = sp.t_max;
    t.meta["samples"] = sp.samples;
    t.meta["bond"] = to_string(sp.bond);
    return t;
}

inline Table point_table(const std::vector<PointEvaluation>& evals) {
    Table t;
    t.columns = {"bond"};
    for (auto& c : param_columns()) t.columns.push_back(c);
    for (auto& c : measure_columns()) t.columns.push_back(c);
    for (const auto& ev : evals) {
        std::vector<Cell> row{std::string(to_string(ev.bond))};
        append_params(row, ev.params);
        append_measures(row, ev);
        t.add_row(std::move(row));
    }
    t.meta["kind"] = "point";
    if (!evals.empty()) t.meta["params"] = params_json(evals.front().params);
    return t;
}

inline Table spectrum_table(const ModelParams& p) {
    Table t;
    t.columns = {"k", "e_optical", "e_acoustic"};
    for (const auto& s : spectrum(p)) t.add_row({s.k, s.e_optical, s.e_acoustic});
    t.meta["kind"] = "spectrum";
    t.meta["params"] = params_json(p);
    t.meta["ground_energy_per_site"] = rounded(ground_energy(p).per_site);
    return t;
}

inline Table scan2d_table(const Scan2DResult& r) {
    Table t;
    t.columns = {"x", "y"};
    for (auto& c : param_columns()) t.columns.push_back(c);
    t.columns.emplace_back(quantity_name(r.spec.quantity));
    t.columns.emplace_back("derivative");
    t.columns.emplace_back("degenerate");
    for (int iy = 0; iy < r.spec.ny; ++iy) {
        for (int ix = 0; ix < r.spec.nx; ++ix) {
            const auto& ev = r.at(ix, iy);
            std::vector<Cell> row{r.x[ix], r.y[iy]};
            append_params(row, ev.params);
            row.emplace_back(ev.value(r.spec.quantity));
            row.emplace_back(r.derivative[static_cast<std::size_t>(iy * r.spec.nx + ix)]);
            row.emplace_back(std::int64_t{ev.degenerate ? 1 : 0});
            t.add_row(std::move(row));
        }
    }
    const auto& sp = r.spec;
    t.meta["kind"] = "scan2d";
    t.meta["n_cells"] = sp.base.n_cells;
    t.meta["base"] = params_json(sp.base);
    t.meta["x_slope"] = sp.x_slope;
    t.meta["y_slope"] = sp.y_slope;
    t.meta["nx"] = sp.nx;
    t.meta["ny"] = sp.ny;
    t.meta["axis"] = sp.axis == Axis::x ? "x" : "y";
    t.meta["bond"] = to_string(sp.bond);
    return t;
}

inline Table transitions_table(const std::vector<CriticalPointReport>& reports, Quantity q) {
    Table t;
    t.columns = {"t"};
    for (auto& c : param_columns()) t.columns.push_back(c);
    for (const char* c : {"order", "jump", "jump_ratio", "peak", "peak_ratio"}) t.columns.emplace_back(c);
    for (const auto& r : reports) {
        std::vector<Cell> row{r.t};
        append_params(row, r.params);
        row.emplace_back(std::string(to_string(r.order)));
        row.insert(row.end(), {r.jump, r.jump_ratio, r.peak, r.peak_ratio});
        t.add_row(std::move(row));
    }
    t.meta["kind"] = "classify";
    t.meta["quantity"] = quantity_name(q);
    return t;
}

}  // namespace eqcm
