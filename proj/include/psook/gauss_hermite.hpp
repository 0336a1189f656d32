#pragma once

#include <array>
#include <cmath>

// 128-node Gauss-Hermite rule (physicists' weight exp(-t^2)).
// Nodes/weights to full double precision; used for all Gaussian-mixture
// integrals so that rate evaluations are deterministic and smooth inside
// optimization loops.

namespace psook::quad {

inline constexpr int kGaussHermiteNodes = 128;

inline constexpr std::array<double, kGaussHermiteNodes> kGhNodes = {
    -1.52918197668827407e+01, -1.47338424735892985e+01, -1.42739813047878350e+01, -1.38652069844762416e+01,
    -1.34895564126231413e+01, -1.31377747880276505e+01, -1.28043120820671312e+01, -1.24855125853494471e+01,
    -1.21788086198312460e+01, -1.18823101188783120e+01, -1.15945750547414512e+01, -1.13144716442899771e+01,
    -1.10410909760196336e+01, -1.07736891151614405e+01, -1.05116473299148687e+01, -1.02544439284709306e+01,
    -1.00016337989301221e+01, -9.75283321343916931e+00, -9.50770832327905602e+00, -9.26596630029617607e+00,
    -9.02734841339478855e+00, -8.79162454488868583e+00, -8.55858879506450876e+00, -8.32805592079014723e+00,
    -8.09985842150789637e+00, -7.87384413353543433e+00, -7.64987422768100700e+00, -7.42782152995230138e+00,
    -7.20756910338733370e+00, -6.98900904264477418e+00, -6.77204144325592861e+00, -6.55657351526448284e+00,
    -6.34251881700177922e+00, -6.12979658942216155e+00, -5.91833117508581186e+00, -5.70805150876808653e+00,
    -5.49889066897390943e+00, -5.29078548147717953e+00, -5.08367616748934026e+00, -4.87750603026481411e+00,
    -4.67222117493263855e+00, -4.46777025714858311e+00, -4.26410425682551875e+00, -4.06117627374927270e+00,
    -3.85894134234428199e+00, -3.65735626323530827e+00, -3.45637944957173726e+00, -3.25597078635065929e+00,
    -3.05609150120268014e+00, -2.85670404529740507e+00, -2.65777198318948393e+00, -2.45925989056573968e+00,
    -2.26113325897306217e+00, -2.06335840670856596e+00, -1.86590239514059864e+00, -1.66873294980372355e+00,
    -1.47181838567448597e+00, -1.27512753608915830e+00, -1.07862968481090893e+00, -8.82294500792981440e-01,
    -6.86091975217334893e-01, -4.89992360415458905e-01, -2.93966110300295680e-01, -9.79838219558189505e-02,
    9.79838219558189505e-02, 2.93966110300295680e-01, 4.89992360415458905e-01, 6.86091975217334893e-01,
    8.82294500792981440e-01, 1.07862968481090893e+00, 1.27512753608915830e+00, 1.47181838567448597e+00,
    1.66873294980372355e+00, 1.86590239514059864e+00, 2.06335840670856596e+00, 2.26113325897306217e+00,
    2.45925989056573968e+00, 2.65777198318948393e+00, 2.85670404529740507e+00, 3.05609150120268014e+00,
    3.25597078635065929e+00, 3.45637944957173726e+00, 3.65735626323530827e+00, 3.85894134234428199e+00,
    4.06117627374927270e+00, 4.26410425682551875e+00, 4.46777025714858311e+00, 4.67222117493263855e+00,
    4.87750603026481411e+00, 5.08367616748934026e+00, 5.29078548147717953e+00, 5.49889066897390943e+00,
    5.70805150876808653e+00, 5.91833117508581186e+00, 6.12979658942216155e+00, 6.34251881700177922e+00,
    6.55657351526448284e+00, 6.77204144325592861e+00, 6.98900904264477418e+00, 7.20756910338733370e+00,
    7.42782152995230138e+00, 7.64987422768100700e+00, 7.87384413353543433e+00, 8.09985842150789637e+00,
    8.32805592079014723e+00, 8.55858879506450876e+00, 8.79162454488868583e+00, 9.02734841339478855e+00,
    9.26596630029617607e+00, 9.50770832327905602e+00, 9.75283321343916931e+00, 1.00016337989301221e+01,
    1.02544439284709306e+01, 1.05116473299148687e+01, 1.07736891151614405e+01, 1.10410909760196336e+01,
    1.13144716442899771e+01, 1.15945750547414512e+01, 1.18823101188783120e+01, 1.21788086198312460e+01,
    1.24855125853494471e+01, 1.28043120820671312e+01, 1.31377747880276505e+01, 1.34895564126231413e+01,
    1.38652069844762416e+01, 1.42739813047878350e+01, 1.47338424735892985e+01, 1.52918197668827407e+01
};

inline constexpr std::array<double, kGaussHermiteNodes> kGhWeights = {
    1.79906598010931732e-102, 2.60817240240920328e-95, 1.40468977131512132e-89, 1.26124948333855603e-84,
    3.40123008693676276e-80, 3.75121586880484750e-76, 2.04158579724400719e-72, 6.21424416183030970e-69,
    1.15615516409640319e-65, 1.40446725774045107e-62, 1.17197850121300453e-59, 6.99307292405216778e-57,
    3.08207738333923714e-54, 1.03048625205570685e-51, 2.67274375173605478e-49, 5.48021702897882183e-47,
    9.02804013878665592e-45, 1.21177953413055941e-42, 1.34149748176440131e-40, 1.23808555797636495e-38,
    9.61670806796741307e-37, 6.33991352636662497e-35, 3.57437889587935754e-33, 1.73510302028202282e-31,
    7.29654500676836404e-30, 2.67292362005807780e-28, 8.57283048376924080e-27, 2.41840345964764437e-25,
    6.02598403200648965e-24, 1.33136785903358521e-22, 2.61745758393482414e-21, 4.59400767732972887e-20,
    7.22010731692833560e-19, 1.01893323042330134e-17, 1.29454815933936379e-16, 1.48422383751384134e-15,
    1.53904973035354758e-14, 1.44634732119041854e-13, 1.23421448660055116e-12, 9.58031650873592161e-12,
    6.77578048777458979e-11, 4.37318665984835389e-10, 2.57939722942641381e-09, 1.39219071529351775e-08,
    6.88458112215433426e-08, 3.12287298617889880e-07, 1.30074700323820348e-06, 4.97992453259099268e-06,
    1.75404858480938508e-05, 5.68874376004023925e-05, 1.70014088262809431e-04, 4.68551537808410267e-04,
    1.19156381445716629e-03, 2.79783940160579451e-03, 6.06886240692587967e-03, 1.21669188644693560e-02,
    2.25543101678244290e-02, 3.86739548106368666e-02, 6.13607210044899848e-02, 9.01086783764489946e-02,
    1.22503273164135798e-01, 1.54210435298354515e-01, 1.79773083907799031e-01, 1.94097611864087666e-01,
    1.94097611864087666e-01, 1.79773083907799031e-01, 1.54210435298354515e-01, 1.22503273164135798e-01,
    9.01086783764489946e-02, 6.13607210044899848e-02, 3.86739548106368666e-02, 2.25543101678244290e-02,
    1.21669188644693560e-02, 6.06886240692587967e-03, 2.79783940160579451e-03, 1.19156381445716629e-03,
    4.68551537808410267e-04, 1.70014088262809431e-04, 5.68874376004023925e-05, 1.75404858480938508e-05,
    4.97992453259099268e-06, 1.30074700323820348e-06, 3.12287298617889880e-07, 6.88458112215433426e-08,
    1.39219071529351775e-08, 2.57939722942641381e-09, 4.37318665984835389e-10, 6.77578048777458979e-11,
    9.58031650873592161e-12, 1.23421448660055116e-12, 1.44634732119041854e-13, 1.53904973035354758e-14,
    1.48422383751384134e-15, 1.29454815933936379e-16, 1.01893323042330134e-17, 7.22010731692833560e-19,
    4.59400767732972887e-20, 2.61745758393482414e-21, 1.33136785903358521e-22, 6.02598403200648965e-24,
    2.41840345964764437e-25, 8.57283048376924080e-27, 2.67292362005807780e-28, 7.29654500676836404e-30,
    1.73510302028202282e-31, 3.57437889587935754e-33, 6.33991352636662497e-35, 9.61670806796741307e-37,
    1.23808555797636495e-38, 1.34149748176440131e-40, 1.21177953413055941e-42, 9.02804013878665592e-45,
    5.48021702897882183e-47, 2.67274375173605478e-49, 1.03048625205570685e-51, 3.08207738333923714e-54,
    6.99307292405216778e-57, 1.17197850121300453e-59, 1.40446725774045107e-62, 1.15615516409640319e-65,
    6.21424416183030970e-69, 2.04158579724400719e-72, 3.75121586880484750e-76, 3.40123008693676276e-80,
    1.26124948333855603e-84, 1.40468977131512132e-89, 2.60817240240920328e-95, 1.79906598010931732e-102
};

// Integrates f against a Gaussian N(mean, sigma2):
//   E[f(Y)] = pi^{-1/2} * sum_i w_i f(mean + sqrt(2 sigma2) t_i)
template <typename F>
double gauss_expect(double mean, double sigma2, F&& f) {
    const double scale = std::sqrt(2.0 * sigma2);
    double acc = 0.0;
    for (int i = 0; i < kGaussHermiteNodes; ++i) {
        acc += kGhWeights[i] * f(mean + scale * kGhNodes[i]);
    }
    return acc / std::sqrt(M_PI);
}

}  // namespace psook::quad
