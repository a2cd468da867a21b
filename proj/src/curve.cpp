#include <algorithm>
#include <sstream>

#include "cartan/connection.hpp"

namespace cartan {

namespace {

std::string describe(const Vector& x) {
  std::ostringstream os;
  os.precision(17);
  os << "(";
  for (Index i = 0; i < x.size(); ++i) os << (i ? ", " : "") << x(i);
  os << ")";
  return os.str();
}

}  // namespace

Domain::Domain(Vector lower, Vector upper) : lower_(std::move(lower)), upper_(std::move(upper)) {
  if (lower_.size() != upper_.size()) throw Error(ErrorKind::input, "domain bounds differ in dimension");
  if (!lower_.allFinite() || !upper_.allFinite()) throw Error(ErrorKind::input, "domain bounds must be finite");
  if ((lower_.array() > upper_.array()).any()) throw Error(ErrorKind::input, "domain lower bound exceeds upper bound");
}

bool Domain::contains(const ChartPoint& x, double slack) const {
  if (x.size() != dim() || !x.allFinite()) return false;
  return ((x.array() >= lower_.array() - slack) && (x.array() <= upper_.array() + slack)).all();
}

void Domain::require(const ChartPoint& x, std::string_view context) const {
  if (!contains(x)) {
    throw Error(ErrorKind::domain,
                std::string(context) + ": point " + describe(x) + " lies outside the chart domain " +
                    describe(lower_) + " - " + describe(upper_));
  }
}

Curve Curve::polyline(std::vector<CurveSample> samples) {
  if (samples.size() < 2) throw Error(ErrorKind::input, "a curve needs at least two samples");
  Curve c;
  c.dim_ = samples.front().point.size();
  for (std::size_t k = 0; k < samples.size(); ++k) {
    if (samples[k].point.size() != c.dim_ || !samples[k].point.allFinite() || !std::isfinite(samples[k].t)) {
      throw Error(ErrorKind::input, "curve sample " + std::to_string(k) + " is malformed");
    }
    if (k > 0 && !(samples[k].t > samples[k - 1].t)) {
      throw Error(ErrorKind::input, "curve parameter must increase strictly (sample " + std::to_string(k) + ")");
    }
  }
  for (std::size_t k = 0; k + 1 < samples.size(); ++k) {
    const double t0 = samples[k].t;
    const double t1 = samples[k + 1].t;
    const Vector x0 = samples[k].point;
    const Vector x1 = samples[k + 1].point;
    const Vector slope = (x1 - x0) / (t1 - t0);
    c.pieces_.push_back(Piece{
        t0, t1,
        [=](double t) -> Vector {
          // Endpoints reproduce the samples exactly.
          if (t <= t0) return x0;
          if (t >= t1) return x1;
          const double u = (t - t0) / (t1 - t0);
          return x0 + u * (x1 - x0);
        },
        [=](double) -> Vector { return slope; }});
  }
  c.samples_ = std::move(samples);
  return c;
}

Curve Curve::parametric(double t0, double t1, PathFn position, PathFn velocity) {
  if (!(t1 > t0) || !std::isfinite(t0) || !std::isfinite(t1)) {
    throw Error(ErrorKind::input, "parametric curve needs a finite interval with t1 > t0");
  }
  Curve c;
  c.dim_ = position(t0).size();
  c.pieces_.push_back(Piece{t0, t1, std::move(position), std::move(velocity)});
  return c;
}

ChartPoint Curve::start() const { return pieces_.front().position(pieces_.front().t0); }

ChartPoint Curve::end() const { return pieces_.back().position(pieces_.back().t1); }

const Curve::Piece& Curve::piece_at(double t) const {
  auto it = std::upper_bound(pieces_.begin(), pieces_.end(), t,
                             [](double value, const Piece& p) { return value < p.t1; });
  if (it == pieces_.end()) return pieces_.back();
  return *it;
}

ChartPoint Curve::position(double t) const { return piece_at(t).position(t); }

Vector Curve::velocity(double t) const { return piece_at(t).velocity(t); }

Curve Curve::reversed() const {
  Curve c;
  c.dim_ = dim_;
  const double total = t_begin() + t_end();
  for (auto it = pieces_.rbegin(); it != pieces_.rend(); ++it) {
    const PathFn pos = it->position;
    const PathFn vel = it->velocity;
    c.pieces_.push_back(Piece{total - it->t1, total - it->t0, [=](double t) { return pos(total - t); },
                              [=](double t) -> Vector { return -vel(total - t); }});
  }
  if (samples_) {
    std::vector<CurveSample> rev;
    rev.reserve(samples_->size());
    for (auto it = samples_->rbegin(); it != samples_->rend(); ++it) rev.push_back({total - it->t, it->point});
    c.samples_ = std::move(rev);
  }
  return c;
}

Curve concatenate(const Curve& first, const Curve& second) {
  if (first.dim_ != second.dim_) throw Error(ErrorKind::input, "cannot join curves of different dimension");
  if ((first.end() - second.start()).cwiseAbs().maxCoeff() > Loop::kClosureTolerance) {
    throw Error(ErrorKind::input, "curves do not join: " + describe(first.end()) + " vs " + describe(second.start()));
  }
  Curve c;
  c.dim_ = first.dim_;
  c.pieces_ = first.pieces_;
  const double shift = first.t_end() - second.t_begin();
  for (const Curve::Piece& p : second.pieces_) {
    const Curve::PathFn pos = p.position;
    const Curve::PathFn vel = p.velocity;
    c.pieces_.push_back(Curve::Piece{p.t0 + shift, p.t1 + shift, [=](double t) { return pos(t - shift); },
                                     [=](double t) { return vel(t - shift); }});
  }
  if (first.samples_ && second.samples_) {
    std::vector<CurveSample> joined = *first.samples_;
    for (std::size_t k = 1; k < second.samples_->size(); ++k) {
      joined.push_back({(*second.samples_)[k].t + shift, (*second.samples_)[k].point});
    }
    c.samples_ = std::move(joined);
  }
  return c;
}

Loop::Loop(Curve curve) : curve_(std::move(curve)), base_(curve_.start()) {
  const double gap = (curve_.end() - base_).cwiseAbs().maxCoeff();
  if (!(gap <= kClosureTolerance)) {
    std::ostringstream os;
    os.precision(3);
    os << "loop endpoints differ by " << gap << " (tolerance " << kClosureTolerance << ")";
    throw Error(ErrorKind::closure, os.str());
  }
}

}  // namespace cartan
