#pragma once

#include <filesystem>
#include <fstream>
#include <map>
#include <string>

namespace frameind {

// A labeling maps instance id strings to label strings. std::map keeps the
// ids sorted, which fixes the on-disk order of labeling files.
using Labeling = std::map<std::string, std::string>;

// TSV, one "instance_id<TAB>label" per line. Duplicate ids and malformed
// lines raise DataError with the line number.
Labeling read_labeling_tsv(std::istream& in);
void write_labeling_tsv(std::ostream& out, const Labeling& labeling);

Labeling read_labeling_file(const std::filesystem::path& path);

// Writes through a temporary file in the target directory and renames on
// commit, so a failed run never leaves a partial output behind.
class AtomicFile {
 public:
  explicit AtomicFile(std::filesystem::path target);
  ~AtomicFile();
  AtomicFile(const AtomicFile&) = delete;
  AtomicFile& operator=(const AtomicFile&) = delete;

  std::ostream& stream() { return out_; }
  void commit();

 private:
  std::filesystem::path target_;
  std::filesystem::path temp_;
  std::ofstream out_;
  bool committed_ = false;
};

std::string lowercase_ascii(std::string s);

}  // namespace frameind
