#pragma once

#include <map>
#include <string>
#include <vector>

#include "qfa/baseline.hpp"
#include "qfa/chain.hpp"
#include "qfa/diagnostics.hpp"
#include "qfa/hierarchy.hpp"
#include "qfa/mcmc.hpp"
#include "qfa/screen.hpp"
#include "qfa/sde.hpp"

namespace qfa {

struct QfaRecord {
    std::string orf;
    double expt_time = 0.0;
    double growth = 0.0;
    std::string row, col, treatment, batch, repeat, plate;
};

struct LoadOptions {
    // Values of a Condition/Treatment column mapped to 0 and 1. Without such a column
    // every record goes to default_condition.
    std::vector<std::string> condition_labels{"control", "query"};
    int default_condition = 0;
    bool drop_edges = false;
};

std::vector<QfaRecord> read_records(const std::string& path);
ScreenDataset group_records(const std::vector<QfaRecord>& recs, const LoadOptions& opts);
ScreenDataset load_screen(const std::string& path, const LoadOptions& opts = {});
// Control file to condition 0, query file to condition 1.
ScreenDataset load_screen_pair(const std::string& control_path, const std::string& query_path,
                               const LoadOptions& opts = {});
void write_screen(const std::string& path, const ScreenDataset& ds);

std::vector<std::string> read_gene_list(const std::string& path);

// Single growth curve: CSV/TSV with time and value columns (Expt.Time/Growth accepted).
GrowthCurve load_curve(const std::string& path);
void write_curve(const std::string& path, const GrowthCurve& c);

void write_chain_csv(const std::string& path, const Chain& chain);
Chain read_chain_csv(const std::string& path);
std::string diagnostics_json(const std::vector<ParamDiagnostics>& d, bool with_acf = false);
void write_text(const std::string& path, const std::string& text);

void write_interactions_csv(const std::string& path, const std::vector<InteractionResult>& r);
std::vector<InteractionResult> read_interactions_csv(const std::string& path);
void write_baseline_csv(const std::string& path, const BaselineReport& rep);
void write_plot_csv(const std::string& path, const std::vector<InteractionResult>& r);

// gene,condition,fitness rows.
void write_fitness_csv(const std::string& path, const FitnessTable& control,
                       const FitnessTable& query);
std::pair<FitnessTable, FitnessTable> read_fitness_csv(const std::string& path);

// Flat key=value configuration; '#' starts a comment.
std::map<std::string, std::string> read_config(const std::string& path);
std::map<std::string, std::string> parse_config(const std::string& text);

// Named presets ship as key=value text; names resolve against preset_dir().
std::string preset_dir();
std::map<std::string, std::string> load_preset(const std::string& name);
HyperParams hyper_from_config(const std::map<std::string, std::string>& cfg,
                              HyperParams base = {});
SdePriors sde_priors_from_config(const std::map<std::string, std::string>& cfg,
                                 SdePriors base = {});

std::string format_double(double v);

}  // namespace qfa
