#include "frameind/io.hpp"

#include <cctype>
#include <istream>
#include <ostream>
#include <system_error>

#include "frameind/errors.hpp"

namespace frameind {

Labeling read_labeling_tsv(std::istream& in) {
  Labeling labeling;
  std::string line;
  std::size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.empty()) continue;
    const auto tab = line.find('\t');
    if (tab == std::string::npos) {
      throw DataError("labeling line " + std::to_string(line_no) + ": expected instance_id<TAB>label");
    }
    std::string id = line.substr(0, tab);
    std::string label = line.substr(tab + 1);
    if (id.empty() || label.empty()) {
      throw DataError("labeling line " + std::to_string(line_no) + ": empty instance id or label");
    }
    if (!labeling.emplace(std::move(id), std::move(label)).second) {
      throw DataError("labeling line " + std::to_string(line_no) + ": duplicate instance id '" +
                      line.substr(0, tab) + "'");
    }
  }
  return labeling;
}

void write_labeling_tsv(std::ostream& out, const Labeling& labeling) {
  for (const auto& [id, label] : labeling) {
    out << id << '\t' << label << '\n';
  }
}

Labeling read_labeling_file(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw DataError("cannot open labeling file '" + path.string() + "'");
  return read_labeling_tsv(in);
}

AtomicFile::AtomicFile(std::filesystem::path target) : target_(std::move(target)) {
  temp_ = target_;
  temp_ += ".tmp";
  out_.open(temp_, std::ios::binary | std::ios::trunc);
  if (!out_) throw DataError("cannot open output file '" + temp_.string() + "'");
}

AtomicFile::~AtomicFile() {
  if (!committed_) {
    out_.close();
    std::error_code ec;
    std::filesystem::remove(temp_, ec);
  }
}

void AtomicFile::commit() {
  out_.flush();
  if (!out_) throw DataError("write failed for '" + temp_.string() + "'");
  out_.close();
  std::error_code ec;
  std::filesystem::rename(temp_, target_, ec);
  if (ec) throw DataError("cannot rename '" + temp_.string() + "' to '" + target_.string() + "'");
  committed_ = true;
}

std::string lowercase_ascii(std::string s) {
  for (char& c : s) c = static_cast<char>(std::tolower(static_cast<unsigned char>(c)));
  return s;
}

}  // namespace frameind
