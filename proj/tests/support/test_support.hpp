#pragma once

#include <filesystem>
#include <map>
#include <string>
#include <string_view>

#include "expert/config.hpp"
#include "expert/corpus_store.hpp"

namespace expert::test {

/// Fresh directory removed on destruction.
class TempDir {
  public:
    TempDir();
    ~TempDir();
    TempDir(const TempDir&) = delete;
    TempDir& operator=(const TempDir&) = delete;

    const std::filesystem::path& path() const { return m_path; }
    std::filesystem::path operator/(std::string_view name) const { return m_path / name; }

  private:
    std::filesystem::path m_path;
};

void write_text(const std::filesystem::path& path, std::string_view content);
std::string read_text(const std::filesystem::path& path);

std::filesystem::path data_dir();
std::filesystem::path planted_dir();

/// The 12-document, 4-author corpus used by the store and retrieval tests:
/// a1 writes d1 and d3 (both co-authored with a4), a2 writes d2, d4, d5 and
/// d6, a3 writes d7 to d12.
void write_small_corpus(const std::filesystem::path& documents,
                        const std::filesystem::path& authors);
Corpus small_corpus();

/// Planted-expert config with its store under `store`, plus overrides.
EngineConfig planted_config(const std::filesystem::path& store,
                            const std::map<std::string, std::string>& overrides = {});

/// Every file below `dir` with its bytes, keyed by relative path.
std::map<std::string, std::string> snapshot_files(const std::filesystem::path& dir);

}  // namespace expert::test
