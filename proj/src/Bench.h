#pragma once

#include "Cegar.h"
#include "Transform.h"

#include <iosfwd>
#include <string>
#include <vector>

namespace horncfa {

struct BenchConfigSpec {
    Direction direction = Direction::Forward;
    Domain domain = Domain::PredCart;
    Refinement refinement = Refinement::Wp;
    PredSplit predSplit = PredSplit::Whole;

    [[nodiscard]] std::string label() const;
    [[nodiscard]] std::string base() const; // without the direction
};

struct BenchOptions {
    std::string exePath; // this binary, re-invoked as `solve` per cell
    std::string corpusDir;
    std::vector<BenchConfigSpec> matrix;
    double taskTimeoutSeconds = 60;
    int jobs = 0; // 0: logical cores
    std::string outCsv;
    std::string solverCommand;
};

struct BenchRecord {
    std::string task;
    BenchConfigSpec config;
    std::string verdict; // sat | unsat | unknown | error
    double wallSeconds = 0;
    long iterations = 0;
    long queries = 0;
    bool validated = false;
    bool timedOut = false;

    [[nodiscard]] bool solved() const { return validated && (verdict == "sat" || verdict == "unsat"); }
};

struct BenchResult {
    std::vector<BenchRecord> records;
    int exitCode = 0;
};

std::vector<std::string> collectCorpus(std::string const & dir);

BenchResult runBench(BenchOptions const & options, std::ostream & log);

void writeBenchCsv(std::vector<BenchRecord> const & records, std::string const & path);
void writeQuantileCsv(std::vector<BenchRecord> const & records, std::string const & path);
std::string benchSummary(std::vector<BenchRecord> const & records);

// Runs a command line with a wall-clock limit, capturing stdout.
struct ProcessResult {
    int exitCode = -1;
    bool timedOut = false;
    std::string output;
};
ProcessResult runProcess(std::vector<std::string> const & argv, double timeoutSeconds);

} // namespace horncfa
