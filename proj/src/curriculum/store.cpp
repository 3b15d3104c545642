#include "geoloop/curriculum/store.hpp"

#include <cstdio>
#include <filesystem>
#include <fstream>
#include <random>

namespace geoloop::curriculum {

bool Curriculum::contains(const std::string& id) const {
  return find(id) != nullptr;
}

const Problem* Curriculum::find(const std::string& id) const {
  for (const auto& p : problems)
    if (p.problem_id == id) return &p;
  return nullptr;
}

std::vector<const Problem*> Curriculum::sampleable() const {
  std::vector<const Problem*> out;
  for (const auto& p : problems)
    if (p.sampleable()) out.push_back(&p);
  return out;
}

void Curriculum::append(Problem p) {
  if (contains(p.problem_id)) return;
  problems.push_back(std::move(p));
}

Curriculum update(const Curriculum& c, const std::vector<AttemptGroup>& failures,
                  const std::vector<Problem>& invented) {
  Curriculum next = c;
  next.version = c.version + 1;
  for (const auto& g : failures)
    if (g.all_fail()) next.fail_groups[g.problem_id].push_back(int(g.rewards.size()));

  for (const auto& p : invented) {
    if (!p.lineage) throw TriggerViolation(p.problem_id);
    const std::string& parent = p.lineage->parent_id;
    if (!next.contains(parent) || !next.fail_groups.count(parent))
      throw TriggerViolation(parent);
    if (p.status != Status::Qualified) continue;  // rejected never enter
    next.append(p);
  }
  return next;
}

std::vector<Problem> sample(const Curriculum& c, int n, std::uint64_t seed) {
  auto pool = c.sampleable();
  if (n > int(pool.size()))
    throw InsufficientProblems("requested " + std::to_string(n) + " of " +
                               std::to_string(pool.size()));
  // partial Fisher-Yates with our own index draws so results do not depend
  // on the standard library's shuffle implementation
  std::mt19937_64 rng(seed);
  std::vector<size_t> idx(pool.size());
  for (size_t i = 0; i < idx.size(); ++i) idx[i] = i;
  std::vector<Problem> out;
  for (int i = 0; i < n; ++i) {
    size_t j = i + size_t(rng() % (idx.size() - size_t(i)));
    std::swap(idx[size_t(i)], idx[j]);
    out.push_back(*pool[idx[size_t(i)]]);
  }
  return out;
}

void Store::save(const Curriculum& c) {
  namespace fs = std::filesystem;
  fs::create_directories(dir_);
  std::string tmp_jsonl = curriculum_path() + ".tmp";
  std::string tmp_meta = meta_path() + ".tmp";
  {
    std::ofstream out(tmp_jsonl);
    for (const auto& p : c.problems) out << to_json(p).dump() << "\n";
  }
  {
    nlohmann::json meta{{"version", c.version},
                        {"count", c.problems.size()},
                        {"fail_groups", c.fail_groups}};
    std::ofstream out(tmp_meta);
    out << meta.dump(2) << "\n";
  }
  // snapshot-then-commit: both files land atomically via rename
  fs::rename(tmp_jsonl, curriculum_path());
  fs::rename(tmp_meta, meta_path());
  last_saved_ = c.problems.size();
}

bool Store::maybe_save(const Curriculum& c) {
  if (c.problems.size() < last_saved_ + 10) return false;
  save(c);
  return true;
}

Curriculum Store::load() const {
  Curriculum c;
  std::ifstream meta(meta_path());
  if (meta) {
    nlohmann::json j;
    meta >> j;
    c.version = j.value("version", 0);
    c.fail_groups =
        j.value("fail_groups", std::map<std::string, std::vector<int>>{});
  }
  std::ifstream in(curriculum_path());
  std::string line;
  while (std::getline(in, line)) {
    if (line.empty()) continue;
    c.append(problem_from_json(nlohmann::json::parse(line)));
  }
  return c;
}

}  // namespace geoloop::curriculum
