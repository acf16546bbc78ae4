import { renderProfileCompare } from "../plots.js";
import { runPlot } from "./common.js";

runPlot("plot-profile-compare <profile.csv> <output.svg>", 2, (args) =>
  renderProfileCompare(args[0]!, args[1]!),
);
