#pragma once

// Generated by tests/oracles/make_oracles.py; do not edit.

namespace oracle {

inline constexpr double kPhiProbeX[] = {-8.0, -5.0, -3.3, -1.959964, -1.0, -0.25, 0.0, 0.3, 1.0, 1.959964, 2.5, 4.0, 7.5};
inline constexpr double kPhiProbeValue[] = {6.220960574271784e-16, 2.866515718791939e-07, 0.0004834241423837775, 0.0249999990964424, 0.15865525393145705, 0.4012936743170763, 0.5, 0.6179114221889527, 0.8413447460685429, 0.9750000009035577, 0.9937903346742238, 0.9999683287581669, 0.9999999999999681};
inline constexpr double kQuantileProbeP[] = {1e-12, 1e-08, 1e-05, 0.001, 0.025, 0.1, 0.5, 0.8, 0.975, 0.999, 0.9999999};
inline constexpr double kQuantileProbeValue[] = {-7.034483825301132, -5.612001244174789, -4.264890793922825, -3.0902323061678136, -1.9599639845400543, -1.2815515655446004, 0.0, 0.8416212335729144, 1.9599639845400538, 3.090232306167813, 5.199337582290661};
inline constexpr double kZ975 = 1.9599639845400543;
inline constexpr double kKlExample = 0.09657359027997266;
inline constexpr double kNormalMass196 = 0.9500042097035591;
inline constexpr double kKdeMidpoint = 0.24197072451914334;
inline constexpr double kBimodalInner = 2.168240852232639;
inline constexpr double kBimodalOuter = 3.831759147767361;
inline constexpr double kMixPostCenters[] = {-1.0, 0.5, 2.0};
inline constexpr double kMixPostWeights[] = {0.07089691233520523, 0.6726511758498956, 0.2564519118148992};
inline constexpr double kMixPostMeans[] = {-0.2285714285714285, 0.6285714285714287, 1.4857142857142858};
inline constexpr double kMixPostVariance = 0.17142857142857143;
inline constexpr double kGridPostX[] = {-1.0, 0.0, 0.5, 1.5};
inline constexpr double kGridPostValue[] = {0.009912233076181916, 0.4214788754360658, 0.7397184631444569, 0.16505349914617307};
inline constexpr double kDeconvTheta[] = {-0.7, 0.1, 0.4, 1.3, 2.2};
inline constexpr double kDeconvVar[] = {0.02, 0.05, 0.03, 0.04, 0.01};
inline constexpr double kDeconvB = 0.45;
inline constexpr double kDeconvX[] = {-2.0, -0.5, 0.0, 0.4, 1.0, 3.1};
inline constexpr double kDeconvValue[] = {-0.025450609410733887, 0.27295825652196837, 0.3451377315173129, 0.35502673332056367, 0.30480587502960693, 0.0517963534434529};
inline constexpr double kLassoX[] = {-0.21118912055729136, -0.5177334709845255, 0.1495958369624623, -1.7898968436779759, 0.2844522535691842, -0.3216956064836901, -0.726050324449302, 0.09853727513129668, -1.9514738484064804, -0.15841288562715672, -0.7312848653804448, 0.40969535789355127, 0.44244173776631784, -0.9278626907702291, -0.9331679527718499, -1.4700371639889616, -0.7876892940867893, 0.3194143920162998, 0.8572703661247674, 0.22879972296310866, 0.03479925265515608, -0.8674471104434567, 0.19577021284431775, -0.8156895315256701, 0.23962888489868106, -0.20259332624012352, 0.8560181034854327, 0.2024703525539789, 1.3688252896097017, -0.4082144474715901, 0.7559450824466323, 0.22516072407457527, 1.6965558201068938, -1.9620539547190585, 0.8742582951813314, -1.0236516100709405, -0.8686467389750054, -0.018363115062379937, -1.5105593611064696, -1.1945810265785586, -0.5055418749192547, -0.32248383162699573, -1.9036789280897755, -0.8736312382373598, -0.14591356690623353, -0.13192758477062216, -0.6623081572224156, -0.004088789106296888, -0.5133744270857837, 1.173498778229933, -0.8091351820079116, 0.05910379879897925, -0.4895950062802856, 0.8545624531310859, -0.9715485115688727, 0.8766026328650387, -1.1953017929996643, -1.366996897121547, -0.5484695736103665, 0.09212685627119044, -1.5210236133299682, -0.5041894554335143, -0.003970465709318486, -0.03555765389596433, 0.8755659365466596, 0.7842735347855208, 0.3328312480926164, 0.9134330350514333, 0.9397262079681602, -1.1091623712921952, 2.185262079056387, -0.04892698270045923, -0.6059423952504954, 0.600149321696642, -0.4885771515933718, 0.6271570321279208, -1.2013988771197082, 0.7253584703756797, -1.2638736463683906, 0.3757325601327688, -0.21322506082178258, -0.5014829692374623, 0.153073453363695, -0.5753083988801887, -0.7719429461651369, 0.3949064774378438, 1.9312068474400939, -0.9977568753677936, 1.1551673162548703, 1.0815576939107636, -1.1200802383514654, 0.1902346053615725, 0.5240390963859574, -0.9108560639633887, 1.079217769211546, 0.8779097900984013, 1.698437695911691, 0.38983442136617874, 0.9460304564262813, 1.8121165247471582, 0.20299055190558077, -0.5002227898590546, -1.450914320783902, 0.2864548014439108, -1.2672165371800261, 1.0976933587930149, 0.14716505891727408, 0.8110572665632209, 0.16271351725088673, 1.2383313599650503, -0.456354677083108, 0.05006772266326947, 1.4001149565290263, -1.2583110321903825, 0.19252723035005864, 0.9752574099039509, -1.0635333890782235, -0.6997189554259344, -1.2499109994493884, 1.180755855958985, -0.18937950941760334, -0.3151526950576845, -1.4125440998120293, -1.0637880888392612, 0.9265324028169399, -0.1894662559146825, -0.4008865295361959, 0.7918978444233291, -0.9058702327124593, 1.6133774967039864, -0.36821453798861686, -0.5130431413146951, -0.2651651322617833, 0.03734160322850226, 0.7011685358520778, -0.6988357023991144, -0.8240273035749163, 0.038157318143834086, 0.338946480595799, 0.8772554573332024, -0.47675317335829226, 0.9670117114464462, -1.0198929249926405, 1.3857781904896354, -1.0920718843489277, -0.08626421702236128, 0.19529433290442091, 1.013168409695103, 1.460167546575992, 0.049231054948360456, 1.8956444686047453, -0.8195254055421561, 0.327085780475411, -0.23690062022112027, 0.5724267033297068, -0.9518576569589675, -1.0978371256871218, 1.2831606687353896, 1.0640303528956363, 0.5611182293510114, -0.7022128648311302, 0.5920709367367252, 0.44715755163459925, 1.233463002510945, 0.23291628084796767, -1.614519078535772, -0.21626000057556494, -0.027445090253328065, 0.7922051499984665, -0.24777281185006933, -1.0582170477267128, 1.150391898846106, 0.385598921102513, -1.0974238644553607, -0.6638390469431474, 0.9191455884612612, -1.3493675504328448, 0.9679760019194605, 0.022872029582339172, -0.15221941895025928};
inline constexpr double kLassoY[] = {0.08191843997372683, 0.040639765345424295, 1.2017801012840477, 2.134298073656468, -0.33715871675254006, 0.9497930149139067, -1.0892433951314797, -3.36570380732765, 0.1808266456019645, -0.9970440547623182, -2.174856865026733, 0.7978354869465138, -0.39956884892163047, -1.4342920760756424, -2.626998989626418, -1.4614529147269208, 1.9286617095617031, -0.5288580346780549, 1.2241235632764247, 0.3666799509557336, 1.0612314288017717, -0.7632585118731119, -0.8912583791352553, 0.8073735004472056, -1.3469080556566995, 2.080735617131032, -2.9031091681933914, 0.7606265145451134, 2.058409495275813, 0.15064904293425485};
inline constexpr double kLassoLambda = 0.1;
inline constexpr double kLassoCoef[] = {1.3603302633059913, 0.0, -0.4956309622033911, -0.0, 0.12189005846360224, -0.0};
inline constexpr double kOlsCoef[] = {1.5492587306448502, 0.15849631964411087, -0.7268136081100744, -0.07785443470840497, 0.34204631012920145, 0.034527584187017915};
inline constexpr double kOlsSigmaHatSq0 = 0.32304410528816596;
inline constexpr double kDebiasedTheta = 1.4791937646459035;
inline constexpr double kDebiasedSigmaHatSq = 0.332834801744327;
inline constexpr double kMleTheta[] = {0.3, -0.2, 1.1, 0.7, 0.05, 0.9, -0.4, 0.6};
inline constexpr double kMleSigmaSq[] = {1.0, 1.5, 0.8, 1.2, 1.0, 0.9, 1.1, 1.3};
inline constexpr double kMleN[] = {20.0, 50.0, 35.0, 80.0, 10.0, 25.0, 60.0, 40.0};
inline constexpr double kMleMean = 0.38957982642030764;
inline constexpr double kMleVariance = 0.23128984538521716;
inline constexpr double kAnovaX0[] = {0.0012301533574825742, 0.2987455375084699, -0.2741378553622176, -0.8905918387572742, -0.45467078517172255, -0.9916465549964624, 0.060143602597438485, 1.3402152455545335, -0.49220651855132963, -0.6204748998199404, 0.4898420501851982, 0.35688700816006075, 0.10541424899789856, -0.9304680447082047, -0.02925182246327349, 0.6953031944582878, -1.344214547285082, -0.45761576104021817, -1.901222739800844, -1.289537739784976, -1.8417350377917323, -0.23509113107468127, -1.2674464814437032, 0.2712643588217015};
inline constexpr double kAnovaY0[] = {-0.25110513484246105, 0.6974436276871792, 0.009283249164447227, -1.4717513130098052, 0.35982135692395406, -0.07797328726646938, 0.524134439555536, -0.8532550885001037, -0.5080472360193147, 0.09627519805687429, -0.3675068008053613, -1.147248002143122};
inline constexpr double kAnovaX1[] = {-0.0325217049455206, 0.8843898673831739, -0.583600432743302, -0.11170194958415963, 0.11046414324948059, 0.06378177425506196, -1.2250558264176934, 0.0761402303770081, 1.3588234217415376, -1.5471446781284823, 0.8593826880215982, 0.11935402569658124, -0.6414703941072214, 2.000416546342423, 0.7622597120847118, -1.1992889021052233, 0.07451622877146342, 0.5766895836701853, -0.1887821253507493, 0.682910267195206, -0.06651732014941557, 0.6672475608343279, 1.438522591656152, -0.6756622510056528, 0.20313861038960904, -0.46330757653841514, 0.12726841122583082, -1.18719452785014, -0.5793015965026732, -0.1961959728044967};
inline constexpr double kAnovaY1[] = {-0.23102155822581194, 0.5634683354487482, -0.0056080403755981445, -0.5270608533819696, 2.8206274157712774, 0.11261138306186957, -2.0601027028817436, 1.9512326804465525, 0.23767302390159234, -0.17048015969935396, -0.39867024697569503, 1.684350778603741, 0.8898182615778423, 2.1078875535999035, 0.17813769178129996};
inline constexpr double kAnovaX2[] = {-0.3036803883647294, 0.35258906728526535, -0.12077044508645512, -0.19728422796572256, -1.1140671431510563, -0.011521468038548173, -0.4435812229744192, 1.1661277761902227, 0.6530885027011638, -0.024143613009932233, 0.6683810232673438, -0.3398695517131494, 1.052126358426947, -0.005399560671626605, 0.5833823541804138, -1.2908932453234871, 0.34668004887842974, -1.6882041173665416};
inline constexpr double kAnovaY2[] = {-0.3150279449496096, 0.8455559421090639, -0.015490385816558483, -0.5387025489637656, 1.824114852306329, 1.2245431089231968, 1.1442796639519281, 2.4442056062331035, 2.8094481292294633};
inline constexpr double kAnovaSigmaEps = 0.09064880471339659;
inline constexpr double kAnovaSigmaPi = 0.22823124347217605;
inline constexpr double kAnovaInfo[] = {7.681742033791331, 14.591602489685176, 8.212466724583445};
inline constexpr double kAnovaPooledInfo = 9.436549021213015;

}  // namespace oracle
