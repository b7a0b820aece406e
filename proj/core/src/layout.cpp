#include <algorithm>
#include <sstream>
#include <unordered_set>

#include "steerfid/errors.hpp"
#include "steerfid/qcore.hpp"

namespace steerfid {

Layout::Layout(std::initializer_list<Subsystem> subsystems) : subsystems_(subsystems) { finalize(); }

Layout::Layout(std::vector<Subsystem> subsystems) : subsystems_(std::move(subsystems)) { finalize(); }

Layout Layout::qubits(const Labels& labels) {
  std::vector<Subsystem> subs;
  subs.reserve(labels.size());
  for (const auto& l : labels) subs.push_back({l, 2});
  return Layout(std::move(subs));
}

void Layout::finalize() {
  std::unordered_set<std::string> seen;
  for (const auto& s : subsystems_) {
    if (s.label.empty()) throw ConfigError("layout: empty subsystem label");
    if (s.dim == 0) throw ConfigError("layout: subsystem '" + s.label + "' has dimension 0");
    if (!seen.insert(s.label).second) throw ConfigError("layout: duplicate label '" + s.label + "'");
  }
  strides_.assign(subsystems_.size(), 1);
  total_dim_ = 1;
  for (std::size_t j = subsystems_.size(); j-- > 0;) {
    strides_[j] = total_dim_;
    total_dim_ *= subsystems_[j].dim;
  }
}

bool Layout::contains(const std::string& label) const {
  return std::any_of(subsystems_.begin(), subsystems_.end(),
                     [&](const Subsystem& s) { return s.label == label; });
}

std::size_t Layout::position_of(const std::string& label) const {
  for (std::size_t j = 0; j < subsystems_.size(); ++j) {
    if (subsystems_[j].label == label) return j;
  }
  throw AddressingError("unknown subsystem label '" + label + "' in layout " + to_string());
}

std::size_t Layout::dim_of(const std::string& label) const { return subsystems_[position_of(label)].dim; }

std::size_t Layout::dim_of(const Labels& labels) const {
  std::size_t d = 1;
  for (auto p : positions(labels)) d *= subsystems_[p].dim;
  return d;
}

Labels Layout::labels() const {
  Labels out;
  out.reserve(subsystems_.size());
  for (const auto& s : subsystems_) out.push_back(s.label);
  return out;
}

std::vector<std::size_t> Layout::positions(const Labels& labels) const {
  std::vector<std::size_t> pos;
  pos.reserve(labels.size());
  for (const auto& l : labels) pos.push_back(position_of(l));
  std::sort(pos.begin(), pos.end());
  if (std::adjacent_find(pos.begin(), pos.end()) != pos.end()) {
    throw AddressingError("duplicate label in subsystem selection");
  }
  return pos;
}

Layout Layout::select(const Labels& labels) const {
  std::vector<Subsystem> subs;
  for (auto p : positions(labels)) subs.push_back(subsystems_[p]);
  return Layout(std::move(subs));
}

Layout Layout::without(const Labels& labels) const {
  const auto pos = positions(labels);
  std::vector<Subsystem> subs;
  for (std::size_t j = 0; j < subsystems_.size(); ++j) {
    if (!std::binary_search(pos.begin(), pos.end(), j)) subs.push_back(subsystems_[j]);
  }
  return Layout(std::move(subs));
}

Layout Layout::concat(const Layout& other) const {
  std::vector<Subsystem> subs = subsystems_;
  subs.insert(subs.end(), other.subsystems_.begin(), other.subsystems_.end());
  return Layout(std::move(subs));
}

Layout Layout::reordered(const Labels& order) const {
  if (order.size() != subsystems_.size()) {
    throw AddressingError("reorder: expected a permutation of all " + std::to_string(size()) + " labels");
  }
  (void)positions(order);  // validates and rejects duplicates
  std::vector<Subsystem> subs;
  subs.reserve(order.size());
  for (const auto& l : order) subs.push_back(subsystems_[position_of(l)]);
  return Layout(std::move(subs));
}

std::vector<std::size_t> Layout::digits(std::size_t index) const {
  std::vector<std::size_t> d(subsystems_.size());
  for (std::size_t j = 0; j < subsystems_.size(); ++j) {
    d[j] = (index / strides_[j]) % subsystems_[j].dim;
  }
  return d;
}

std::string Layout::to_string() const {
  std::ostringstream os;
  os << '[';
  for (std::size_t j = 0; j < subsystems_.size(); ++j) {
    if (j) os << ", ";
    os << subsystems_[j].label << ':' << subsystems_[j].dim;
  }
  os << ']';
  return os.str();
}

IndexSplit::IndexSplit(const Layout& layout, const Labels& selected) {
  const auto sel = layout.positions(selected);
  std::vector<std::size_t> rest;
  for (std::size_t j = 0; j < layout.size(); ++j) {
    if (!std::binary_search(sel.begin(), sel.end(), j)) rest.push_back(j);
  }

  // Offsets of every composite index over a subset of positions.
  auto offsets = [&](const std::vector<std::size_t>& positions) {
    std::vector<std::size_t> out{0};
    for (auto p : positions) {
      std::vector<std::size_t> next;
      next.reserve(out.size() * layout.at(p).dim);
      for (auto base : out) {
        for (std::size_t d = 0; d < layout.at(p).dim; ++d) next.push_back(base + d * layout.stride(p));
      }
      out = std::move(next);
    }
    return out;
  };
  selected_offset_ = offsets(sel);
  rest_offset_ = offsets(rest);

  const std::size_t total = layout.total_dim();
  selected_of_.assign(total, 0);
  rest_of_.assign(total, 0);
  for (std::size_t s = 0; s < selected_offset_.size(); ++s) {
    for (std::size_t r = 0; r < rest_offset_.size(); ++r) {
      const std::size_t full = selected_offset_[s] + rest_offset_[r];
      selected_of_[full] = s;
      rest_of_[full] = r;
    }
  }
}

}  // namespace steerfid
