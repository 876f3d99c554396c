#pragma once

#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "dpgcn/graph.hpp"
#include "dpgcn/trainer.hpp"

namespace dpgcn {

/// Shortest round-trip decimal form of a double (locale-free, deterministic).
std::string format_double(double v);

/// Writes content to `path` via a temp file + rename, creating parent dirs.
void atomic_write(const std::string& path, const std::string& content);

void write_json(const std::string& path, const nlohmann::json& j);

/// history.csv: `epoch,loss,test_acc,test_macro_f1`, one row per epoch.
std::string history_csv(const std::vector<EpochRecord>& history);

/// embeddings CSV: `node_id,dim_0..dim_{d-1}`.
std::string embeddings_csv(const Matrix& embedding);

/// roles TSV: `node_id<TAB>role_id`.
std::string roles_tsv(const std::vector<int>& member_of);

/// features CSV with a generic header `node_id,f_0..f_{p-1}`.
std::string features_csv(const Matrix& features);

/// FNV-1a 64 hash of a string, hex-encoded (spec checksums on outputs).
std::string string_checksum(const std::string& content);

}  // namespace dpgcn
