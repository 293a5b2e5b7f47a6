#pragma once

// Generated by tests/oracle/gen_transform_oracle.py; do not edit.

#include <array>

namespace iam::oracle {

struct TransformPoint {
  double p;
  double gumbel_map;
  double logit;
  double bounded[4];  // one per kEpsPairs entry
};

struct EpsPair {
  double eps1;
  double eps2;
  double lower;
  double upper;
};

inline constexpr std::array<EpsPair, 4> kEpsPairs = {{
    {0.01, 1e-05, -2.444338569640761167027037, 4.606170681316703254750142},
    {0.1, 0.0001, -2.231125650446265100420990, 2.303585543280916784059170},
    {0.001, 1e-06, -2.625864294270180845042951, 6.908755778815220397962801},
    {0.01, 1e-10, -3.137051738445351677510005, 4.605170195988091396719302},
}};

inline constexpr std::array<TransformPoint, 25> kTransformPoints = {{
    {1e-12, -3.318939095035956110760849, -27.63102111592754822832925, {-2.444338560962409845748553, -2.231125649372190517125405, -2.625864221893039598445421, -3.136619695343313931963515}},
    {1e-09, -3.031257022584175179588309, -20.72326583594641109338033, {-2.444329891685278941325983, -2.231124576376470535664874, -2.625791950643107585048531, -3.027131888088737668131303}},
    {1e-06, -2.625791914476010803891131, -13.81550955796377414902655, {-2.436032819570678686258422, -2.230056339185457493484832, -2.574394105647704455738530, -2.626508244107696042360294}},
    {0.0001, -2.220326806367846413434641, -9.210240366975849329810104, {-2.211021208194243863357405, -2.153759415806267723246333, -2.219354564068249294671634, -2.221411845131516916856287}},
    {0.001, -1.932644733916065488184935, -6.906754778648553497716312, {-1.932651924235678392769394, -1.933323424564155598103300, -1.932644806250257742465999, -1.934091320900934739125780}},
    {0.01, -1.527179625807901104700160, -4.595119850134589905825483, {-1.529132152057153454157868, -1.546544939068628844944196, -1.527375040315762683553789, -1.529348741811931004270513}},
    {0.05, -1.097188700364948684415602, -2.944438979166440401576237, {-1.100454688257629257580333, -1.129378863165597320168216, -1.097515778972350840617520, -1.100521222678323661853340}},
    {0.1, -0.8340324452479557756950264, -2.197224577336219321111434, {-0.8383227462728527306203193, -0.8761291828205059474396857, -0.8344623044040679549471888, -0.8383659862654328879321527}},
    {0.2, -0.4758849953271105865314997, -1.386294361119890549445525, {-0.4820482467889306449530413, -0.5358721468304368510957156, -0.4765030325703956529635479, -0.4820791210950758938957933}},
    {0.3, -0.1856267588623656745171823, -0.8472978603872036665778706, {-0.1938708327025133035765379, -0.2651599885831292856388971, -0.1864542313504369373629406, -0.1938982904033492698997839}},
    {0.36787944117144233, 3.378485525913422584364308e-17, -0.5413248546129180555315023, {-0.009923417175316607061160580, -0.09506306632497727431833308, -0.0009967847668249863973906511, -0.009950330584031234905416169}},
    {0.4, 0.08742157179075515615970901, -0.4054651081081642894594277, {0.07659411769918490584074467, -0.01591346953152372421371411, 0.08633353563714505551649047, 0.07656712857578156231251661}},
    {0.5, 0.3665129205816643270124392, 0.0, {0.3522174920689100596816143, 0.2319986414589441157325346, 0.3650741464600309882961519, 0.3521890486860866847362466}},
    {0.6, 0.6717269920921219629292935, 0.4054651081081642894594277, {0.6523719892375768719532303, 0.4932166245916427700160874, 0.6697745468546891066595220, 0.6523399888385488830498046}},
    {0.7, 1.030930433158722904236098, 0.8472978603872034022390552, {1.003318495380352407543969, 0.7840962703586120326312834, 1.028134676922377670842176, 1.003279535129822663617071}},
    {0.8, 1.499939986759515806674140, 1.386294361119890896390220, {1.456154531205846879064257, 1.130045498815553272497919, 1.495474155100394529511475, 1.456100915603326647885225}},
    {0.9, 2.250367327312445520489319, 2.197224577336219629506718, {2.159789455984337889920514, 1.583529401693440901950518, 2.240931311087332726435209, 2.159693136430560749303124}},
    {0.95, 2.970195249042163647764384, 2.944438979166439525084375, {2.792256582782117834841057, 1.889230940262289104213679, 2.950907260090318006246023, 2.792084833829769275584465}},
    {0.99, 4.600149226776579105066291, 4.595119850134589029702515, {3.910013281555958101452423, 2.207735647914682869200052, 4.505385870707957096619858, 3.909509379609600485874584}},
    {0.999, 6.907255070523715611295120, 6.906754778648552629486344, {4.510724891573574113790740, 2.293621335345563216990715, 6.214858463219074793905858, 4.509814531446536726099552}},
    {0.9999, 9.210290369892834533653903, 9.210240366975959522875189, {4.596210043205103835288704, 2.302585092994045738688886, 6.813350144222601042720928, 4.595219369954511625431895}},
    {0.999999, 13.81551005793531009175597, 13.81550955793501841050312, {4.606070587177628658824543, 2.303575534317394150406177, 6.907755278982108275527525, 4.605070200936770277765847}},
    {0.999999999, 20.72326586472834303345367, 20.72326586422834304730297, {4.606170581217612437495243, 2.303585533271908504038273, 6.908754777815749707813726, 4.605170095988098184911958}},
    {0.999999999999, 27.63104323789285858251656, 27.63104323789235859357742, {4.606170681216606370511229, 2.303585543270907996867521, 6.908755777814242542805109, 4.605170195888093607906286}},
    {0.75, 1.245899323707238198380781, 1.098612288668109691395245, {1.211774024175358332799707, 0.9479136367938396052299272, 1.242433910440007604840554, 1.211729233403746012930963}},
}};

// GumbelMap minus Bounded GumbelMap at p = 0.5 for the last kEpsPairs entry.
inline constexpr double kGapHalf = 0.01432387189557764227619256;

}  // namespace iam::oracle
