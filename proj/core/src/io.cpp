#include "dpgcn/io.hpp"

#include <charconv>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <stdexcept>

namespace dpgcn {

std::string format_double(double v) {
  char buf[64];
  auto [ptr, ec] = std::to_chars(buf, buf + sizeof(buf), v);
  if (ec != std::errc()) throw std::runtime_error("format_double failed");
  return std::string(buf, ptr);
}

void atomic_write(const std::string& path, const std::string& content) {
  namespace fs = std::filesystem;
  const fs::path target(path);
  if (target.has_parent_path()) fs::create_directories(target.parent_path());
  const fs::path tmp = target.string() + ".tmp";
  {
    std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
    if (!out) throw std::runtime_error("atomic_write: cannot open " + tmp.string());
    out << content;
    if (!out) throw std::runtime_error("atomic_write: write failed for " + tmp.string());
  }
  fs::rename(tmp, target);
}

void write_json(const std::string& path, const nlohmann::json& j) {
  atomic_write(path, j.dump(2) + "\n");
}

std::string history_csv(const std::vector<EpochRecord>& history) {
  std::string out = "epoch,loss,test_acc,test_macro_f1\n";
  for (const EpochRecord& r : history) {
    out += std::to_string(r.epoch) + "," + format_double(r.loss) + "," +
           format_double(r.test_acc) + "," + format_double(r.test_macro_f1) + "\n";
  }
  return out;
}

std::string embeddings_csv(const Matrix& embedding) {
  std::string out = "node_id";
  for (Eigen::Index d = 0; d < embedding.cols(); ++d) {
    out += ",dim_" + std::to_string(d);
  }
  out += "\n";
  for (Eigen::Index i = 0; i < embedding.rows(); ++i) {
    out += std::to_string(i);
    for (Eigen::Index d = 0; d < embedding.cols(); ++d) {
      out += "," + format_double(embedding(i, d));
    }
    out += "\n";
  }
  return out;
}

std::string roles_tsv(const std::vector<int>& member_of) {
  std::string out;
  for (std::size_t i = 0; i < member_of.size(); ++i) {
    out += std::to_string(i) + "\t" + std::to_string(member_of[i]) + "\n";
  }
  return out;
}

std::string features_csv(const Matrix& features) {
  std::string out = "node_id";
  for (Eigen::Index d = 0; d < features.cols(); ++d) out += ",f_" + std::to_string(d);
  out += "\n";
  for (Eigen::Index i = 0; i < features.rows(); ++i) {
    out += std::to_string(i);
    for (Eigen::Index d = 0; d < features.cols(); ++d) {
      out += "," + format_double(features(i, d));
    }
    out += "\n";
  }
  return out;
}

std::string string_checksum(const std::string& content) {
  std::uint64_t h = 1469598103934665603ULL;
  for (unsigned char c : content) {
    h ^= c;
    h *= 1099511628211ULL;
  }
  char buf[17];
  std::snprintf(buf, sizeof(buf), "%016llx", static_cast<unsigned long long>(h));
  return std::string(buf);
}

}  // namespace dpgcn
