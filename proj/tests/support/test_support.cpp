#include "test_support.hpp"

#include <fstream>
#include <random>
#include <sstream>

namespace expert::test {

TempDir::TempDir()
{
    std::random_device rd;
    auto base = std::filesystem::temp_directory_path();
    for (;;) {
        m_path = base / ("expert-test-" + std::to_string(rd()));
        if (std::filesystem::create_directory(m_path)) {
            break;
        }
    }
}

TempDir::~TempDir()
{
    std::error_code ec;
    std::filesystem::remove_all(m_path, ec);
}

void write_text(const std::filesystem::path& path, std::string_view content)
{
    if (path.has_parent_path()) {
        std::filesystem::create_directories(path.parent_path());
    }
    std::ofstream out(path, std::ios::binary);
    out << content;
}

std::string read_text(const std::filesystem::path& path)
{
    std::ifstream in(path, std::ios::binary);
    std::ostringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

std::filesystem::path data_dir()
{
    return EXPERT_TEST_DATA;
}

std::filesystem::path planted_dir()
{
    return data_dir() / "planted";
}

void write_small_corpus(const std::filesystem::path& documents,
                        const std::filesystem::path& authors)
{
    write_text(authors,
               "a1\tAlice Archer\n"
               "a2\tBob Baker\n"
               "a3\tCarol Cooper\n"
               "a4\tDan Dyer\n");
    write_text(documents,
               "d1\tGraph clustering\tGraph clustering of citation networks.\ta1;a4\tpaper\n"
               "d2\tRetrieval models\tBM25 and language models for information retrieval.\ta2\tpaper\n"
               "d3\tCommunity detection\tModularity based graph clustering at scale.\ta1;a4\tthesis\n"
               "d4\tQuery expansion\tPseudo relevance feedback for information retrieval.\ta2\tpaper\n"
               "d5\tEvaluation\tMean average precision and NDCG.\ta2\tcourse_page\n"
               "d6\tIndexing\tInverted index compression.\ta2\tpaper\n"
               "d7\tProtein folding\tMolecular dynamics of protein folding.\ta3\tpaper\n"
               "d8\tGenomics\tGenome editing with CRISPR.\ta3\tpaper\n"
               "d9\tCells\tSingle cell RNA sequencing.\ta3\tthesis\n"
               "d10\tBio profile\tCarol works on protein folding.\ta3\tprofile_page\n"
               "d11\tEnzymes\tEnzyme kinetics and protein structure.\ta3\tpaper\n"
               "d12\tTeaching\tIntroductory\\tmolecular biology\\nnotes.\ta3\tother\n");
}

Corpus small_corpus()
{
    auto dir = std::filesystem::temp_directory_path() /
               ("expert-small-" + std::to_string(std::random_device{}()));
    write_small_corpus(dir / "docs.tsv", dir / "authors.tsv");
    auto corpus = Corpus::read(dir / "docs.tsv", dir / "authors.tsv");
    std::filesystem::remove_all(dir);
    return corpus;
}

EngineConfig planted_config(const std::filesystem::path& store,
                            const std::map<std::string, std::string>& overrides)
{
    auto config = EngineConfig::load(planted_dir() / "engine.conf");
    config.store = store;
    for (const auto& [k, v] : overrides) {
        config.set(k, v);
    }
    config.validate();
    return config;
}

std::map<std::string, std::string> snapshot_files(const std::filesystem::path& dir)
{
    std::map<std::string, std::string> out;
    for (const auto& entry : std::filesystem::recursive_directory_iterator(dir)) {
        if (entry.is_regular_file()) {
            out[std::filesystem::relative(entry.path(), dir).string()] = read_text(entry.path());
        }
    }
    return out;
}

}  // namespace expert::test
