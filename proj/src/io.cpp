#include "qfa/io.hpp"

#include <algorithm>
#include <cctype>
#include <charconv>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <set>
#include <sstream>

#include <json.hpp>

#include "qfa/errors.hpp"

#ifndef QFA_PRESET_DIR
#define QFA_PRESET_DIR "data/presets"
#endif

namespace qfa {

namespace {

std::string trim(const std::string& s)
{
    std::size_t a = 0, b = s.size();
    while (a < b && std::isspace(static_cast<unsigned char>(s[a]))) ++a;
    while (b > a && std::isspace(static_cast<unsigned char>(s[b - 1]))) --b;
    std::string out = s.substr(a, b - a);
    if (out.size() >= 2 && out.front() == '"' && out.back() == '"')
        out = out.substr(1, out.size() - 2);
    return out;
}

std::vector<std::string> split(const std::string& line, char delim)
{
    std::vector<std::string> out;
    std::string cur;
    for (char ch : line) {
        if (ch == delim) {
            out.push_back(trim(cur));
            cur.clear();
        } else if (ch != '\r') {
            cur += ch;
        }
    }
    out.push_back(trim(cur));
    return out;
}

std::ifstream open_in(const std::string& path)
{
    std::ifstream in(path);
    if (!in) throw DataError("cannot open " + path);
    return in;
}

std::ofstream open_out(const std::string& path)
{
    std::ofstream out(path);
    if (!out) throw DataError("cannot write " + path);
    return out;
}

double parse_double(const std::string& s, const std::string& where)
{
    if (s == "NA" || s == "nan" || s == "NaN") return std::nan("");
    char* end = nullptr;
    const double v = std::strtod(s.c_str(), &end);
    if (s.empty() || end != s.c_str() + s.size())
        throw DataError("not a number '" + s + "' at " + where);
    return v;
}

struct Table {
    std::vector<std::string> header;
    std::vector<std::vector<std::string>> rows;
    std::vector<std::size_t> line_no;

    int column(std::initializer_list<const char*> names) const
    {
        for (const char* n : names)
            for (std::size_t j = 0; j < header.size(); ++j)
                if (header[j] == n) return static_cast<int>(j);
        return -1;
    }
};

Table read_table(const std::string& path)
{
    auto in = open_in(path);
    Table t;
    std::string line;
    char delim = '\t';
    std::size_t n = 0;
    while (std::getline(in, line)) {
        ++n;
        if (trim(line).empty()) continue;
        if (t.header.empty()) {
            if (line.find('\t') == std::string::npos && line.find(',') != std::string::npos)
                delim = ',';
            t.header = split(line, delim);
            continue;
        }
        auto f = split(line, delim);
        if (f.size() != t.header.size())
            throw DataError(path + ":" + std::to_string(n) + ": expected " +
                            std::to_string(t.header.size()) + " fields, got " +
                            std::to_string(f.size()));
        t.rows.push_back(std::move(f));
        t.line_no.push_back(n);
    }
    if (t.header.empty()) throw SchemaError(path + ": empty file");
    return t;
}

// Orders "2" before "10" and "plate2" before "plate10".
bool natural_less(const std::string& a, const std::string& b)
{
    std::size_t i = 0, j = 0;
    while (i < a.size() && j < b.size()) {
        const bool da = std::isdigit(static_cast<unsigned char>(a[i]));
        const bool db = std::isdigit(static_cast<unsigned char>(b[j]));
        if (da && db) {
            std::size_t ie = i, je = j;
            while (ie < a.size() && std::isdigit(static_cast<unsigned char>(a[ie]))) ++ie;
            while (je < b.size() && std::isdigit(static_cast<unsigned char>(b[je]))) ++je;
            std::string na = a.substr(i, ie - i), nb = b.substr(j, je - j);
            na.erase(0, std::min(na.find_first_not_of('0'), na.size()));
            nb.erase(0, std::min(nb.find_first_not_of('0'), nb.size()));
            if (na.size() != nb.size()) return na.size() < nb.size();
            if (na != nb) return na < nb;
            i = ie;
            j = je;
        } else {
            if (a[i] != b[j]) return a[i] < b[j];
            ++i;
            ++j;
        }
    }
    if ((a.size() - i) != (b.size() - j)) return (a.size() - i) < (b.size() - j);
    return a < b;
}

}  // namespace

std::string format_double(double v)
{
    if (std::isnan(v)) return "NA";
    if (std::isinf(v)) return v > 0 ? "Inf" : "-Inf";
    char buf[40];
    std::snprintf(buf, sizeof buf, "%.17g", v);
    return buf;
}

std::vector<QfaRecord> read_records(const std::string& path)
{
    const Table t = read_table(path);
    const int orf = t.column({"ORF"});
    const int time = t.column({"Expt.Time"});
    const int growth = t.column({"Growth"});
    if (orf < 0) throw SchemaError(path + ": missing required column ORF");
    if (time < 0) throw SchemaError(path + ": missing required column Expt.Time");
    if (growth < 0) throw SchemaError(path + ": missing required column Growth");
    const int row = t.column({"Row"});
    const int col = t.column({"Col", "Column"});
    const int treat = t.column({"Condition", "Treatment"});
    const int batch = t.column({"Batch"});
    const int plate = t.column({"Barcode", "Plate"});
    const int rep = t.column({"Repeat"});

    std::vector<QfaRecord> out;
    out.reserve(t.rows.size());
    for (std::size_t i = 0; i < t.rows.size(); ++i) {
        const auto& f = t.rows[i];
        const std::string where = path + ":" + std::to_string(t.line_no[i]);
        QfaRecord r;
        r.orf = f[orf];
        r.expt_time = parse_double(f[time], where);
        r.growth = parse_double(f[growth], where);
        if (!std::isfinite(r.growth)) throw DataError("non-finite Growth at " + where);
        if (!(r.expt_time >= 0.0)) throw DataError("negative or missing Expt.Time at " + where);
        if (row >= 0) r.row = f[row];
        if (col >= 0) r.col = f[col];
        if (treat >= 0) r.treatment = f[treat];
        if (plate >= 0) r.plate = f[plate];
        if (batch >= 0) r.batch = f[batch];
        else if (plate >= 0) r.batch = f[plate];
        if (rep >= 0) r.repeat = f[rep];
        out.push_back(std::move(r));
    }
    return out;
}

ScreenDataset group_records(const std::vector<QfaRecord>& recs, const LoadOptions& opts)
{
    ScreenDataset ds;
    ds.condition_labels = opts.condition_labels;

    const bool keyed_repeat =
        !recs.empty() && std::all_of(recs.begin(), recs.end(),
                                     [](const QfaRecord& r) { return !r.repeat.empty(); });
    const bool keyed_pos =
        !recs.empty() && std::all_of(recs.begin(), recs.end(), [](const QfaRecord& r) {
            return !r.row.empty() && !r.col.empty();
        });

    // Plate extents for edge filtering.
    std::map<std::string, std::pair<long, long>> row_ext, col_ext;
    if (opts.drop_edges) {
        if (!keyed_pos) throw SchemaError("edge filtering needs Row and Col columns");
        for (const auto& r : recs) {
            const long rv = std::stol(r.row), cv = std::stol(r.col);
            auto [ri, rnew] = row_ext.try_emplace(r.plate, rv, rv);
            auto [ci, cnew] = col_ext.try_emplace(r.plate, cv, cv);
            ri->second = {std::min(ri->second.first, rv), std::max(ri->second.second, rv)};
            ci->second = {std::min(ci->second.first, cv), std::max(ci->second.second, cv)};
        }
    }

    struct Key {
        int condition;
        std::string gene, id;
        bool operator<(const Key& o) const
        {
            if (gene != o.gene) return natural_less(gene, o.gene);
            if (condition != o.condition) return condition < o.condition;
            return natural_less(id, o.id);
        }
    };
    std::map<Key, RepeatSeries> groups;
    std::map<std::pair<int, std::string>, std::pair<int, double>> reset_state;
    std::set<std::string> genes;

    for (std::size_t i = 0; i < recs.size(); ++i) {
        const auto& r = recs[i];
        int cond = opts.default_condition;
        if (!r.treatment.empty()) {
            auto it = std::find(opts.condition_labels.begin(), opts.condition_labels.end(),
                                r.treatment);
            if (it == opts.condition_labels.end())
                throw DataError("record " + std::to_string(i + 1) + ": unknown condition '" +
                                r.treatment + "'");
            cond = static_cast<int>(it - opts.condition_labels.begin());
        }
        if (opts.drop_edges) {
            const long rv = std::stol(r.row), cv = std::stol(r.col);
            const auto re = row_ext[r.plate], ce = col_ext[r.plate];
            if (rv == re.first || rv == re.second || cv == ce.first || cv == ce.second) continue;
        }
        genes.insert(r.orf);
        std::string id;
        if (keyed_repeat) {
            id = r.repeat;
        } else if (keyed_pos) {
            id = (r.plate.empty() ? "" : r.plate + ":") + r.row + ":" + r.col;
        } else {
            auto& st = reset_state.try_emplace({cond, r.orf}, 0, -1.0).first->second;
            if (st.second >= 0.0 && r.expt_time <= st.second) ++st.first;
            st.second = r.expt_time;
            id = std::to_string(st.first + 1);
        }
        auto& g = groups[Key{cond, r.orf, id}];
        if (g.gene.empty()) {
            g.gene = r.orf;
            g.condition = cond;
            g.id = id;
            g.batch = r.batch;
        }
        g.times.push_back(r.expt_time);
        g.values.push_back(r.growth);
    }

    ds.genes.assign(genes.begin(), genes.end());
    std::sort(ds.genes.begin(), ds.genes.end(), natural_less);
    for (auto& [key, g] : groups) {
        std::vector<std::size_t> idx(g.times.size());
        for (std::size_t i = 0; i < idx.size(); ++i) idx[i] = i;
        std::stable_sort(idx.begin(), idx.end(),
                         [&](std::size_t a, std::size_t b) { return g.times[a] < g.times[b]; });
        RepeatSeries s = g;
        for (std::size_t i = 0; i < idx.size(); ++i) {
            s.times[i] = g.times[idx[i]];
            s.values[i] = g.values[idx[i]];
            if (i > 0 && !(s.times[i] > s.times[i - 1]))
                throw DataError("non-monotone time in gene " + s.gene + " repeat " + s.id +
                                ": duplicate Expt.Time " + format_double(s.times[i]));
        }
        ds.repeats.push_back(std::move(s));
    }
    ds.validate();
    return ds;
}

ScreenDataset load_screen(const std::string& path, const LoadOptions& opts)
{
    return group_records(read_records(path), opts);
}

ScreenDataset load_screen_pair(const std::string& control_path, const std::string& query_path,
                               const LoadOptions& opts)
{
    auto a = read_records(control_path);
    auto b = read_records(query_path);
    for (auto& r : a) r.treatment = opts.condition_labels.at(0);
    for (auto& r : b) r.treatment = opts.condition_labels.at(1);
    a.insert(a.end(), b.begin(), b.end());
    return group_records(a, opts);
}

void write_screen(const std::string& path, const ScreenDataset& ds)
{
    auto out = open_out(path);
    out << "ORF\tCondition\tRepeat\tBatch\tExpt.Time\tGrowth\n";
    for (const auto& r : ds.repeats)
        for (std::size_t i = 0; i < r.times.size(); ++i)
            out << r.gene << '\t' << ds.condition_labels.at(r.condition) << '\t' << r.id << '\t'
                << r.batch << '\t' << format_double(r.times[i]) << '\t'
                << format_double(r.values[i]) << '\n';
}

std::vector<std::string> read_gene_list(const std::string& path)
{
    auto in = open_in(path);
    std::vector<std::string> out;
    std::string line;
    while (std::getline(in, line)) {
        const auto h = line.find('#');
        if (h != std::string::npos) line.erase(h);
        line = trim(line);
        if (!line.empty()) out.push_back(line);
    }
    return out;
}

GrowthCurve load_curve(const std::string& path)
{
    const Table t = read_table(path);
    const int time = t.column({"time", "Expt.Time", "t"});
    const int value = t.column({"value", "Growth", "y"});
    if (time < 0) throw SchemaError(path + ": missing required column time");
    if (value < 0) throw SchemaError(path + ": missing required column value");
    GrowthCurve c;
    for (std::size_t i = 0; i < t.rows.size(); ++i) {
        const std::string where = path + ":" + std::to_string(t.line_no[i]);
        c.times.push_back(parse_double(t.rows[i][time], where));
        c.values.push_back(parse_double(t.rows[i][value], where));
        if (i > 0 && !(c.times[i] > c.times[i - 1]))
            throw DataError("non-monotone time at " + where);
    }
    return c;
}

void write_curve(const std::string& path, const GrowthCurve& c)
{
    auto out = open_out(path);
    out << "time,value\n";
    for (std::size_t i = 0; i < c.times.size(); ++i)
        out << format_double(c.times[i]) << ',' << format_double(c.values[i]) << '\n';
}

void write_chain_csv(const std::string& path, const Chain& chain)
{
    auto out = open_out(path);
    out << "# burn_in=" << chain.burn_in << " thin=" << chain.thin << " seed=" << chain.seed
        << '\n';
    for (std::size_t j = 0; j < chain.names.size(); ++j)
        out << (j ? "," : "") << chain.names[j];
    out << '\n';
    for (std::size_t i = 0; i < chain.n_draws(); ++i) {
        for (std::size_t j = 0; j < chain.names.size(); ++j)
            out << (j ? "," : "") << format_double(chain.at(i, j));
        out << '\n';
    }
}

Chain read_chain_csv(const std::string& path)
{
    auto in = open_in(path);
    Chain c;
    std::string line;
    std::size_t n = 0;
    while (std::getline(in, line)) {
        ++n;
        if (line.rfind("#", 0) == 0) {
            std::istringstream meta(line.substr(1));
            std::string kv;
            while (meta >> kv) {
                const auto eq = kv.find('=');
                if (eq == std::string::npos) continue;
                const std::string k = kv.substr(0, eq), v = kv.substr(eq + 1);
                if (k == "burn_in") c.burn_in = std::stoull(v);
                else if (k == "thin") c.thin = std::stoull(v);
                else if (k == "seed") c.seed = std::stoull(v);
            }
            continue;
        }
        if (trim(line).empty()) continue;
        auto f = split(line, ',');
        if (c.names.empty()) {
            c.names = f;
            continue;
        }
        if (f.size() != c.names.size())
            throw DataError(path + ":" + std::to_string(n) + ": wrong field count");
        for (const auto& s : f) c.draws.push_back(parse_double(s, path + ":" + std::to_string(n)));
    }
    if (c.names.empty()) throw SchemaError(path + ": no header");
    return c;
}

std::string diagnostics_json(const std::vector<ParamDiagnostics>& d, bool with_acf)
{
    nlohmann::ordered_json j = nlohmann::ordered_json::object();
    auto num = [](double v) -> nlohmann::ordered_json {
        if (std::isfinite(v)) return v;
        return nullptr;
    };
    for (const auto& p : d) {
        nlohmann::ordered_json e;
        e["mean"] = num(p.mean);
        e["sd"] = num(p.sd);
        e["ess"] = num(p.ess);
        e["hw_pvalue"] = num(p.hw_pvalue);
        e["degenerate"] = p.degenerate;
        if (with_acf) e["acf"] = p.acf;
        j[p.name] = e;
    }
    return j.dump(2) + "\n";
}

void write_text(const std::string& path, const std::string& text)
{
    auto out = open_out(path);
    out << text;
}

void write_interactions_csv(const std::string& path, const std::vector<InteractionResult>& r)
{
    auto out = open_out(path);
    out << "gene,delta_mean,gamma_strength,omega_strength,control_fitness,query_fitness,"
           "classification\n";
    for (const auto& x : r)
        out << x.gene << ',' << format_double(x.delta_mean) << ','
            << format_double(x.gamma_strength) << ',' << format_double(x.omega_strength) << ','
            << format_double(x.control_fitness) << ',' << format_double(x.query_fitness) << ','
            << x.classification << '\n';
}

std::vector<InteractionResult> read_interactions_csv(const std::string& path)
{
    const Table t = read_table(path);
    const char* cols[] = {"gene",           "delta_mean",      "gamma_strength", "omega_strength",
                          "control_fitness", "query_fitness", "classification"};
    int idx[7];
    for (int k = 0; k < 7; ++k) {
        idx[k] = t.column({cols[k]});
        if (idx[k] < 0) throw SchemaError(path + ": missing required column " + cols[k]);
    }
    std::vector<InteractionResult> out;
    for (std::size_t i = 0; i < t.rows.size(); ++i) {
        const auto& f = t.rows[i];
        const std::string where = path + ":" + std::to_string(t.line_no[i]);
        InteractionResult x;
        x.gene = f[idx[0]];
        x.delta_mean = parse_double(f[idx[1]], where);
        x.gamma_strength = parse_double(f[idx[2]], where);
        x.omega_strength = parse_double(f[idx[3]], where);
        x.control_fitness = parse_double(f[idx[4]], where);
        x.query_fitness = parse_double(f[idx[5]], where);
        x.classification = f[idx[6]];
        out.push_back(std::move(x));
    }
    return out;
}

void write_baseline_csv(const std::string& path, const BaselineReport& rep)
{
    auto out = open_out(path);
    out << "gene,gamma_hat,p_value,q_value,significant,control_fitness,query_fitness,"
           "classification\n";
    for (const auto& x : rep.results) {
        std::string cls = "none";
        if (x.significant) cls = x.gamma_hat > 0 ? "suppressor" : "enhancer";
        out << x.gene << ',' << format_double(x.gamma_hat) << ',' << format_double(x.p_value)
            << ',' << format_double(x.q_value) << ',' << (x.significant ? 1 : 0) << ','
            << format_double(x.control_mean) << ',' << format_double(x.query_mean) << ','
            << cls << '\n';
    }
}

void write_plot_csv(const std::string& path, const std::vector<InteractionResult>& r)
{
    auto out = open_out(path);
    out << "gene,control_fitness,query_fitness,classification\n";
    for (const auto& x : r)
        out << x.gene << ',' << format_double(x.control_fitness) << ','
            << format_double(x.query_fitness) << ',' << x.classification << '\n';
}

void write_fitness_csv(const std::string& path, const FitnessTable& control,
                       const FitnessTable& query)
{
    auto out = open_out(path);
    out << "gene,condition,fitness\n";
    for (const auto& [g, v] : control)
        for (double f : v) out << g << ",control," << format_double(f) << '\n';
    for (const auto& [g, v] : query)
        for (double f : v) out << g << ",query," << format_double(f) << '\n';
}

std::pair<FitnessTable, FitnessTable> read_fitness_csv(const std::string& path)
{
    const Table t = read_table(path);
    const int g = t.column({"gene", "ORF"});
    const int c = t.column({"condition", "Condition"});
    const int f = t.column({"fitness"});
    if (g < 0) throw SchemaError(path + ": missing required column gene");
    if (c < 0) throw SchemaError(path + ": missing required column condition");
    if (f < 0) throw SchemaError(path + ": missing required column fitness");
    FitnessTable ctl, qry;
    for (std::size_t i = 0; i < t.rows.size(); ++i) {
        const auto& row = t.rows[i];
        const std::string where = path + ":" + std::to_string(t.line_no[i]);
        const double v = parse_double(row[f], where);
        if (row[c] == "control" || row[c] == "0") ctl[row[g]].push_back(v);
        else if (row[c] == "query" || row[c] == "1") qry[row[g]].push_back(v);
        else throw DataError("unknown condition '" + row[c] + "' at " + where);
    }
    return {ctl, qry};
}

std::map<std::string, std::string> parse_config(const std::string& text)
{
    std::map<std::string, std::string> out;
    std::istringstream in(text);
    std::string line;
    std::size_t n = 0;
    while (std::getline(in, line)) {
        ++n;
        const auto h = line.find('#');
        if (h != std::string::npos) line.erase(h);
        line = trim(line);
        if (line.empty()) continue;
        const auto eq = line.find('=');
        if (eq == std::string::npos)
            throw DataError("config line " + std::to_string(n) + ": expected key=value");
        const std::string k = trim(line.substr(0, eq));
        if (k.empty()) throw DataError("config line " + std::to_string(n) + ": empty key");
        out[k] = trim(line.substr(eq + 1));
    }
    return out;
}

std::map<std::string, std::string> read_config(const std::string& path)
{
    auto in = open_in(path);
    std::stringstream ss;
    ss << in.rdbuf();
    return parse_config(ss.str());
}

std::string preset_dir()
{
    if (const char* env = std::getenv("QFA_PRESET_DIR")) return env;
    return QFA_PRESET_DIR;
}

std::map<std::string, std::string> load_preset(const std::string& name)
{
    static const std::set<std::string> known{"shm-priors-2011", "sde-priors"};
    if (!known.count(name)) throw UsageError("unknown preset '" + name + "'");
    const auto path = std::filesystem::path(preset_dir()) / (name + ".cfg");
    if (!std::filesystem::exists(path)) throw DataError("preset file not found: " + path.string());
    return read_config(path.string());
}

HyperParams hyper_from_config(const std::map<std::string, std::string>& cfg, HyperParams base)
{
    const auto known = base.to_map();
    for (const auto& [k, v] : cfg) {
        if (!known.count(k)) continue;
        base.set(k, parse_double(v, "config key " + k));
    }
    base.validate();
    return base;
}

SdePriors sde_priors_from_config(const std::map<std::string, std::string>& cfg, SdePriors base)
{
    auto get = [&](const std::string& k, double& dst) {
        const auto it = cfg.find(k);
        if (it != cfg.end()) dst = parse_double(it->second, "config key " + k);
    };
    get("log_K.mean", base.log_K.mean);
    get("log_K.prec", base.log_K.prec);
    get("log_r.mean", base.log_r.mean);
    get("log_r.prec", base.log_r.prec);
    get("log_P.mean", base.log_P.mean);
    get("log_P.prec", base.log_P.prec);
    get("log_sigma_prec.mean", base.log_sigma_prec.mean);
    get("log_sigma_prec.prec", base.log_sigma_prec.prec);
    get("log_nu_prec.mean", base.log_nu_prec.mean);
    get("log_nu_prec.prec", base.log_nu_prec.prec);
    get("log_sigma_prec.lower", base.log_sigma_prec_lower);
    for (const NormalPrior* p : {&base.log_K, &base.log_r, &base.log_P, &base.log_sigma_prec,
                                 &base.log_nu_prec})
        if (!std::isfinite(p->mean) || !(p->prec > 0.0))
            throw InvalidParameter("sde priors: non-finite mean or non-positive precision");
    return base;
}

}  // namespace qfa
