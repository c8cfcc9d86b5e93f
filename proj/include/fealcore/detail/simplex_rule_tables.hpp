#pragma once

// Generated by tools/gen_simplex_rules.py. Do not edit by hand.
//
// Fully symmetric quadrature rules on the reference triangle and tetrahedron,
// stored as symmetry orbits in barycentric coordinates. Every orbit carries the
// weight of each of its points; weights sum to one over the whole rule.

#include <algorithm>
#include <array>
#include <stdexcept>
#include <vector>

namespace fealcore::detail {

enum class Orbit { s3, s21, s111, s4, s31, s22, s211, s1111 };

struct OrbitEntry {
    Orbit kind;
    double weight;
    std::array<double, 3> param;
};

/// All distinct barycentric points of an orbit (padded to four coordinates).
inline std::vector<std::array<double, 4>> expand_orbit(const OrbitEntry& e)
{
    const auto& p = e.param;
    std::array<double, 4> rep{};
    int n = 3;
    switch (e.kind) {
    case Orbit::s3: rep = {1.0 / 3.0, 1.0 / 3.0, 1.0 / 3.0, 0.0}; break;
    case Orbit::s21: rep = {p[0], p[0], 1 - 2 * p[0], 0.0}; break;
    case Orbit::s111: rep = {p[0], p[1], 1 - p[0] - p[1], 0.0}; break;
    case Orbit::s4: rep = {0.25, 0.25, 0.25, 0.25}; n = 4; break;
    case Orbit::s31: rep = {p[0], p[0], p[0], 1 - 3 * p[0]}; n = 4; break;
    case Orbit::s22: rep = {p[0], p[0], 0.5 - p[0], 0.5 - p[0]}; n = 4; break;
    case Orbit::s211: rep = {p[0], p[0], p[1], 1 - 2 * p[0] - p[1]}; n = 4; break;
    case Orbit::s1111: rep = {p[0], p[1], p[2], 1 - p[0] - p[1] - p[2]}; n = 4; break;
    }
    std::sort(rep.begin(), rep.begin() + n);
    std::vector<std::array<double, 4>> out;
    do {
        out.push_back(rep);
    } while (std::next_permutation(rep.begin(), rep.begin() + n));
    return out;
}

// degree 1, 1 points
inline const std::vector<OrbitEntry> k_triangle_q1 = {
    {Orbit::s3, 1.0, {0.0, 0.0, 0.0}},
};

// degree 2, 3 points
inline const std::vector<OrbitEntry> k_triangle_q2 = {
    {Orbit::s21, 0.33333333333333337, {0.16666666666666666, 0.0, 0.0}},
};

// degree 3, 6 points
inline const std::vector<OrbitEntry> k_triangle_q3 = {
    {Orbit::s21, 0.2556404474936296, {0.15692403154313053, 0.0, 0.0}},
    {Orbit::s21, 0.07769288583970375, {0.4628699842738003, 0.0, 0.0}},
};

// degree 4, 6 points
inline const std::vector<OrbitEntry> k_triangle_q4 = {
    {Orbit::s21, 0.2233815896780115, {0.4459484909159649, 0.0, 0.0}},
    {Orbit::s21, 0.10995174365532186, {0.09157621350977074, 0.0, 0.0}},
};

// degree 5, 7 points
inline const std::vector<OrbitEntry> k_triangle_q5 = {
    {Orbit::s3, 0.22500000000000006, {0.0, 0.0, 0.0}},
    {Orbit::s21, 0.12593918054482722, {0.10128650732345638, 0.0, 0.0}},
    {Orbit::s21, 0.13239415278850616, {0.4701420641051151, 0.0, 0.0}},
};

// degree 6, 12 points
inline const std::vector<OrbitEntry> k_triangle_q6 = {
    {Orbit::s21, 0.05084490637020672, {0.06308901449150213, 0.0, 0.0}},
    {Orbit::s21, 0.11678627572637917, {0.2492867451709105, 0.0, 0.0}},
    {Orbit::s111, 0.08285107561837372, {0.6365024991213987, 0.3103524510337843, 0.0}},
};

// degree 7, 15 points
inline const std::vector<OrbitEntry> k_triangle_q7 = {
    {Orbit::s21, 0.12539360744930306, {0.24325913983560757, 0.0, 0.0}},
    {Orbit::s111, 0.027663524601473415, {0.08663663134174884, 0.8676425388119307, 0.0}},
    {Orbit::s111, 0.0763063383405417, {0.630641425845256, 0.31864418984753706, 0.0}},
};

// degree 8, 16 points
inline const std::vector<OrbitEntry> k_triangle_q8 = {
    {Orbit::s3, 0.144315607677787, {0.0, 0.0, 0.0}},
    {Orbit::s21, 0.10321737053471815, {0.17056930775176038, 0.0, 0.0}},
    {Orbit::s21, 0.032458497623198204, {0.05054722831703107, 0.0, 0.0}},
    {Orbit::s21, 0.09509163426728438, {0.45929258829272307, 0.0, 0.0}},
    {Orbit::s111, 0.027230314174435173, {0.7284923929554036, 0.008394777409957832, 0.0}},
};

// degree 9, 19 points
inline const std::vector<OrbitEntry> k_triangle_q9 = {
    {Orbit::s3, 0.09713579628279692, {0.0, 0.0, 0.0}},
    {Orbit::s21, 0.02557767565869795, {0.04472951339445259, 0.0, 0.0}},
    {Orbit::s21, 0.031334700227140244, {0.48968251919873707, 0.0, 0.0}},
    {Orbit::s21, 0.07782754100477383, {0.4370895914929355, 0.0, 0.0}},
    {Orbit::s21, 0.07964773892720987, {0.1882035356190328, 0.0, 0.0}},
    {Orbit::s111, 0.04328353937728958, {0.22196298916076562, 0.7411985987844979, 0.0}},
};

// degree 10, 25 points
inline const std::vector<OrbitEntry> k_triangle_q10 = {
    {Orbit::s3, 0.07989450474124006, {0.0, 0.0, 0.0}},
    {Orbit::s21, 0.07112380223237738, {0.4250862106020906, 0.0, 0.0}},
    {Orbit::s21, 0.00822381869046416, {0.023308867510000168, 0.0, 0.0}},
    {Orbit::s111, 0.03088665688456388, {0.8210720699856298, 0.14329537042686696, 0.0}},
    {Orbit::s111, 0.03735985623430512, {0.029946031954170726, 0.6113138261813976, 0.0}},
    {Orbit::s111, 0.04543059229617023, {0.14792562620953362, 0.628307400213493, 0.0}},
};

// degree 11, 36 points
inline const std::vector<OrbitEntry> k_triangle_q11 = {
    {Orbit::s111, 0.02444171069721759, {0.14384772136634658, 0.14427304705606508, 0.0}},
    {Orbit::s111, 0.02504032347627078, {0.021521265856433946, 0.3731129981925856, 0.0}},
    {Orbit::s111, 0.050153507607773345, {0.11000721955389593, 0.3372216877319602, 0.0}},
    {Orbit::s111, 0.03511098871808753, {0.3020740508912204, 0.24047270301988613, 0.0}},
    {Orbit::s111, 0.025012946867070517, {0.027875620276769056, 0.1650070494427956, 0.0}},
    {Orbit::s111, 0.00690718930024689, {0.032754542108688646, 0.03273602152946178, 0.0}},
};

// degree 12, 39 points
inline const std::vector<OrbitEntry> k_triangle_q12 = {
    {Orbit::s111, 0.0021064827602868662, {0.021547568942084046, 0.010850917134155875, 0.0}},
    {Orbit::s111, 0.017892362608155164, {0.027240481896679734, 0.1059877105356945, 0.0}},
    {Orbit::s111, 0.023663754504823126, {0.023483505049327752, 0.2738459889800279, 0.0}},
    {Orbit::s111, 0.013349640501378877, {0.023577437538481277, 0.48871259138811063, 0.0}},
    {Orbit::s111, 0.05035188956671546, {0.11944237930308967, 0.5401936385786017, 0.0}},
    {Orbit::s21, 0.061434857028665045, {0.27231512608503944, 0.0, 0.0}},
    {Orbit::s111, 0.028585108210974656, {0.11565369046123221, 0.17338386370421324, 0.0}},
};

inline constexpr int k_max_triangle_degree = 12;

inline const std::vector<OrbitEntry>& triangle_rule_table(int q)
{
    switch (q) {
    case 1: return k_triangle_q1;
    case 2: return k_triangle_q2;
    case 3: return k_triangle_q3;
    case 4: return k_triangle_q4;
    case 5: return k_triangle_q5;
    case 6: return k_triangle_q6;
    case 7: return k_triangle_q7;
    case 8: return k_triangle_q8;
    case 9: return k_triangle_q9;
    case 10: return k_triangle_q10;
    case 11: return k_triangle_q11;
    case 12: return k_triangle_q12;
    default: throw std::out_of_range("no symmetric rule of this degree");
    }
}

// degree 1, 1 points
inline const std::vector<OrbitEntry> k_tetrahedron_q1 = {
    {Orbit::s4, 1.0, {0.0, 0.0, 0.0}},
};

// degree 2, 4 points
inline const std::vector<OrbitEntry> k_tetrahedron_q2 = {
    {Orbit::s31, 0.25000000000000006, {0.13819660112501056, 0.0, 0.0}},
};

// degree 3, 10 points
inline const std::vector<OrbitEntry> k_tetrahedron_q3 = {
    {Orbit::s31, 0.1233142361941103, {0.12170240379899255, 0.0, 0.0}},
    {Orbit::s22, 0.08445717587059312, {0.41104461608980825, 0.0, 0.0}},
};

// degree 4, 14 points
inline const std::vector<OrbitEntry> k_tetrahedron_q4 = {
    {Orbit::s31, 0.06406837969416318, {0.3096242083961682, 0.0, 0.0}},
    {Orbit::s31, 0.05907818034636468, {0.0832344837823665, 0.0, 0.0}},
    {Orbit::s22, 0.08456895997298146, {0.42222549252211694, 0.0, 0.0}},
};

// degree 5, 14 points
inline const std::vector<OrbitEntry> k_tetrahedron_q5 = {
    {Orbit::s31, 0.07349304311636196, {0.09273525031089123, 0.0, 0.0}},
    {Orbit::s31, 0.11268792571801582, {0.3108859192633006, 0.0, 0.0}},
    {Orbit::s22, 0.04254602077708148, {0.4544962958743503, 0.0, 0.0}},
};

// degree 6, 24 points
inline const std::vector<OrbitEntry> k_tetrahedron_q6 = {
    {Orbit::s31, 0.010077211055320643, {0.04067395853461141, 0.0, 0.0}},
    {Orbit::s31, 0.05535718154365499, {0.32233789014227543, 0.0, 0.0}},
    {Orbit::s31, 0.03992275025816736, {0.21460287125915192, 0.0, 0.0}},
    {Orbit::s211, 0.04821428571428567, {0.06366100187501746, 0.2696723314583158, 0.0}},
};

// degree 7, 96 points
inline const std::vector<OrbitEntry> k_tetrahedron_q7 = {
    {Orbit::s1111, 0.00366214237118726, {0.02781342857647505, 0.027819843110453327, 0.12636907973695438}},
    {Orbit::s1111, 0.01136258953792482, {0.09114202570551508, 0.11368898555113598, 0.21308642948542889}},
    {Orbit::s1111, 0.013744675282402424, {0.08557387740716287, 0.2609464516513698, 0.29477759609945486}},
    {Orbit::s1111, 0.01289725947515216, {0.00915850532835628, 0.10376381228114602, 0.3302164767502553}},
};

// degree 8, 96 points
inline const std::vector<OrbitEntry> k_tetrahedron_q8 = {
    {Orbit::s211, 0.013396919824837508, {0.2653982163181778, 0.020803587018517908, 0.0}},
    {Orbit::s1111, 0.01355736846882547, {0.10514218541366478, 0.6274265895525777, 0.21717899804944474}},
    {Orbit::s211, 0.027692931285819906, {0.14060390603216516, 0.3592842511200486, 0.0}},
    {Orbit::s1111, 0.005078295939493816, {0.07154113417243874, 4.701848508897674e-06, 0.37434755023044763}},
    {Orbit::s1111, 0.002486076703018669, {0.009730517544829228, 0.11394154563107364, 0.0359669820793847}},
};

inline constexpr int k_max_tetrahedron_degree = 8;

inline const std::vector<OrbitEntry>& tetrahedron_rule_table(int q)
{
    switch (q) {
    case 1: return k_tetrahedron_q1;
    case 2: return k_tetrahedron_q2;
    case 3: return k_tetrahedron_q3;
    case 4: return k_tetrahedron_q4;
    case 5: return k_tetrahedron_q5;
    case 6: return k_tetrahedron_q6;
    case 7: return k_tetrahedron_q7;
    case 8: return k_tetrahedron_q8;
    default: throw std::out_of_range("no symmetric rule of this degree");
    }
}

} // namespace fealcore::detail
