#include <cmath>
#include <vector>

#include "doctest.h"
#include "fixtures.h"
#include "vidmesh/error.h"
#include "vidmesh/flow_control.h"

using namespace vidmesh;
using vidmesh::testing::LineXY;
using vidmesh::testing::MakeScenario;

namespace {

LinkId Mcs0(const Network& net, NodeId u, NodeId v) {
  for (LinkId e : net.out_links(u)) {
    if (net.link(e).v == v && net.link(e).mcs == 0) return e;
  }
  return -1;
}

// 0 -> 1 -> 2 -> 3 with `rate` packets per period on every hop.
struct Chain {
  explicit Chain(int rate)
      : net(MakeScenario(LineXY(4, 100.0), {{0, 3}})), mf(net.num_links(), 1) {
    for (NodeId x = 0; x < 3; ++x) {
      hops.push_back(Mcs0(net, x, x + 1));
      mf.at(hops.back(), 0) = rate;
    }
  }
  std::vector<double> PPlus(const std::vector<double>& per_hop) const {
    std::vector<double> p(net.num_links(), 0.0);
    for (size_t h = 0; h < hops.size(); ++h) p[hops[h]] = per_hop[h];
    return p;
  }
  Network net;
  MfTable mf;
  std::vector<LinkId> hops;
};

}  // namespace

TEST_CASE("steady state is a fixed point at mf") {
  const Chain c(10);
  FlowControl fc(c.net, c.mf);
  CHECK(fc.encoder_rate(0) == 10.0);
  for (int p = 0; p < 20; ++p) fc.Step(c.PPlus({10, 10, 10}));
  CHECK(fc.periods() == 20);
  CHECK(fc.encoder_rate(0) == 10.0);
  for (LinkId e : c.hops) CHECK(fc.request(e, 0) == 10.0);
  CHECK(fc.r_in(3, 0) == 10.0);
  for (NodeId v = 0; v < 4; ++v) CHECK(fc.participates(v, 0));
}

TEST_CASE("a downstream bottleneck reaches the encoder one hop per period") {
  const Chain c(10);
  FlowControl fc(c.net, c.mf);
  const auto p = c.PPlus({10, 10, 4});
  std::vector<double> enc;
  for (int step = 0; step < 6; ++step) {
    fc.Step(p);
    enc.push_back(fc.encoder_rate(0));
  }
  CHECK(fc.r_in(2, 0) == 4.0);
  CHECK(fc.request(c.hops[1], 0) == 4.0);
  CHECK(enc[0] == 10.0);
  CHECK(enc[1] == 10.0);
  CHECK(enc[2] == 4.0);
  for (size_t i = 1; i < enc.size(); ++i) CHECK(enc[i] <= enc[i - 1]);
  CHECK(enc.back() == 4.0);
}

TEST_CASE("a lost request is held, then decays by half per period") {
  const Chain c(10);
  FlowControl fc(c.net, c.mf);
  const size_t cell = static_cast<size_t>(c.hops[0]);  // k = 1
  FcDelivery lost;
  lost.backward.assign(c.net.num_links(), 1);
  lost.backward[cell] = 0;
  const double expect[] = {10, 10, 10, 5, 2.5};
  for (double want : expect) {
    fc.Step(c.PPlus({10, 10, 10}), lost);
    CHECK(fc.request(c.hops[0], 0) == doctest::Approx(want));
  }
  // The encoder acts on the request in force when the step began.
  CHECK(fc.encoder_rate(0) == doctest::Approx(5.0));
  CHECK(fc.set_request(c.hops[0], 0) == 10.0);
  fc.Step(c.PPlus({10, 10, 10}));
  CHECK(fc.request(c.hops[0], 0) == 10.0);

  FcConfig slow;
  slow.silent_periods = 1;
  slow.decay = 0.25;
  FlowControl fc2(c.net, c.mf, slow);
  fc2.Step(c.PPlus({10, 10, 10}), lost);
  fc2.Step(c.PPlus({10, 10, 10}), lost);
  CHECK(fc2.request(c.hops[0], 0) == doctest::Approx(2.5));
}

TEST_CASE("a lost P+ report keeps the last known value") {
  const Chain c(10);
  FlowControl fc(c.net, c.mf);
  fc.Step(c.PPlus({6, 10, 10}));
  CHECK(fc.r_in(1, 0) == 6.0);
  FcDelivery lost;
  lost.forward.assign(c.net.num_links(), 1);
  lost.forward[c.hops[0]] = 0;
  fc.Step(c.PPlus({10, 10, 10}), lost);
  CHECK(fc.r_in(1, 0) == 6.0);
  fc.Step(c.PPlus({10, 10, 10}));
  CHECK(fc.r_in(1, 0) == 10.0);
}

TEST_CASE("a merging node splits its request in proportion to inflow") {
  // Diamond 0 -> {1, 2} -> 3 feeding the chain 3 -> 4.
  const double h = 100.0 / std::sqrt(2.0);
  const Network net(MakeScenario({{0, 0}, {h, h}, {h, -h}, {2 * h, 0}, {2 * h + 100, 0}},
                                 {{0, 4}}));
  const LinkId a1 = Mcs0(net, 0, 1), a2 = Mcs0(net, 0, 2), b1 = Mcs0(net, 1, 3),
               b2 = Mcs0(net, 2, 3), out = Mcs0(net, 3, 4);
  MfTable mf(net.num_links(), 1);
  mf.at(a1, 0) = mf.at(b1, 0) = 6;
  mf.at(a2, 0) = mf.at(b2, 0) = 4;
  mf.at(out, 0) = 10;
  FlowControl fc(net, mf);
  CHECK(fc.r_in(0, 0) == 10.0);
  CHECK(fc.r_in(3, 0) == 10.0);
  std::vector<double> p(net.num_links(), 0.0);
  p[a1] = p[b1] = 6;
  p[a2] = p[b2] = 4;
  p[out] = 5;
  fc.Step(p);
  CHECK(fc.r_in(3, 0) == 5.0);
  CHECK(fc.set_request(b1, 0) == doctest::Approx(3.0));
  CHECK(fc.set_request(b2, 0) == doctest::Approx(2.0));
  fc.Step(p);
  fc.Step(p);
  CHECK(fc.encoder_rate(0) == doctest::Approx(5.0));
}

TEST_CASE("bad inputs") {
  const Chain c(10);
  FlowControl fc(c.net, c.mf);
  CHECK_THROWS_AS(fc.Step(std::vector<double>(3, 0.0)), InputError);
  CHECK_THROWS_AS(FlowControl(c.net, MfTable(c.net.num_links(), 2)), InputError);
  CHECK_FALSE(FlowControl(c.net, MfTable(c.net.num_links(), 1)).participates(2, 0));
}
