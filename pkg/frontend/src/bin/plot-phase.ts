import { renderPhase } from "../plots.js";
import { runPlot } from "./common.js";

runPlot("plot-phase <profile.csv> <fit.csv> <output.svg>", 3, (args) =>
  renderPhase(args[0]!, args[1]!, args[2]!),
);
