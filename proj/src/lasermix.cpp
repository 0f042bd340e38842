#include "dgt/lasermix.hpp"

#include <algorithm>
#include <limits>
#include <tuple>

#include "dgt/error.hpp"

namespace dgt {

namespace {

std::vector<int> area_indices(const Scan& scan, const InclinationPartition& part) {
  std::vector<int> areas(scan.size());
  for (std::size_t i = 0; i < scan.size(); ++i) {
    areas[i] = part.area_index(scan.points[i]);
  }
  return areas;
}

void append_point(Scan& dst, const Scan& src, std::uint32_t i) {
  dst.points.push_back(src.points[i]);
  dst.labels->push_back((*src.labels)[i]);
  dst.instance_ids->push_back(src.instance_ids ? (*src.instance_ids)[i] : 0);
}

}  // namespace

MixResult laser_mix(const Scan& source, const Scan& target,
                    const InclinationPartition& part) {
  part.validate();
  if (!source.has_labels() || !target.has_labels()) {
    throw DataError("unlabeled input scan");
  }
  source.validate();
  target.validate();
  const auto src_area = area_indices(source, part);
  const auto tgt_area = area_indices(target, part);

  // Group indices by area, keeping input order inside each group.
  auto group = [&](const std::vector<int>& areas) {
    std::vector<std::vector<std::uint32_t>> groups(static_cast<std::size_t>(part.n));
    for (std::size_t i = 0; i < areas.size(); ++i) {
      groups[areas[i]].push_back(static_cast<std::uint32_t>(i));
    }
    return groups;
  };
  const auto src_groups = group(src_area);
  const auto tgt_groups = group(tgt_area);

  MixResult out;
  for (Scan* s : {&out.mix1, &out.mix2}) {
    s->sensor = source.sensor;
    s->labels.emplace();
    s->instance_ids.emplace();
  }
  for (int a = 0; a < part.n; ++a) {
    const bool even = a % 2 == 0;
    // mix1: source on even areas, target on odd; mix2 the other way round.
    const auto& g1 = even ? src_groups[a] : tgt_groups[a];
    const auto& g2 = even ? tgt_groups[a] : src_groups[a];
    const Scan& s1 = even ? source : target;
    const Scan& s2 = even ? target : source;
    const Provenance p1 = even ? Provenance::kSource : Provenance::kTarget;
    const Provenance p2 = even ? Provenance::kTarget : Provenance::kSource;
    for (auto i : g1) {
      append_point(out.mix1, s1, i);
      out.provenance1.push_back(p1);
      out.origin1.push_back(i);
    }
    for (auto i : g2) {
      append_point(out.mix2, s2, i);
      out.provenance2.push_back(p2);
      out.origin2.push_back(i);
    }
  }
  return out;
}

InclinationPartition default_inclination_bounds(const Scan& source,
                                                const Scan& target, int n) {
  double lo = std::numeric_limits<double>::infinity();
  double hi = -std::numeric_limits<double>::infinity();
  for (const Scan* s : {&source, &target}) {
    for (const auto& p : s->points) {
      const double phi = inclination_of(p);
      lo = std::min(lo, phi);
      hi = std::max(hi, phi);
    }
  }
  if (lo > hi) throw DataError("cannot derive inclination bounds from empty scans");
  InclinationPartition part{n, lo - kInclinationBoundMargin,
                            hi + kInclinationBoundMargin};
  part.validate();
  return part;
}

std::uint64_t verify_mix(const Scan& source, const Scan& target,
                         const InclinationPartition& part,
                         const MixResult& mix) {
  std::uint64_t violations = 0;
  using Key = std::tuple<int, int, float, float, float, float, ClassId>;
  // (provenance, area, point, label) for every expected and observed point.
  std::vector<Key> expected;
  std::vector<Key> observed;
  auto key = [&](Provenance prov, const Point& p, ClassId label) {
    return Key{static_cast<int>(prov), part.area_index(p), p.x, p.y, p.z,
               p.intensity, label};
  };
  for (std::size_t i = 0; i < source.size(); ++i) {
    expected.push_back(key(Provenance::kSource, source.points[i], (*source.labels)[i]));
  }
  for (std::size_t i = 0; i < target.size(); ++i) {
    expected.push_back(key(Provenance::kTarget, target.points[i], (*target.labels)[i]));
  }

  auto check = [&](const Scan& mixed, const std::vector<Provenance>& prov,
                   bool source_on_even) {
    if (prov.size() != mixed.size() || !mixed.labels ||
        mixed.labels->size() != mixed.size()) {
      ++violations;
      return;
    }
    for (std::size_t i = 0; i < mixed.size(); ++i) {
      const int area = part.area_index(mixed.points[i]);
      const bool from_source = prov[i] == Provenance::kSource;
      if (from_source != ((area % 2 == 0) == source_on_even)) ++violations;
      observed.push_back(key(prov[i], mixed.points[i], (*mixed.labels)[i]));
    }
  };
  check(mix.mix1, mix.provenance1, true);
  check(mix.mix2, mix.provenance2, false);

  std::sort(expected.begin(), expected.end());
  std::sort(observed.begin(), observed.end());
  if (expected != observed) {
    std::vector<Key> diff;
    std::set_symmetric_difference(expected.begin(), expected.end(),
                                  observed.begin(), observed.end(),
                                  std::back_inserter(diff));
    violations += std::max<std::uint64_t>(diff.size(), 1);
  }
  return violations;
}

}  // namespace dgt
