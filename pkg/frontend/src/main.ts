import { ApiClient } from "./api.js";
import { App } from "./app.js";

const root = document.getElementById("app");
if (!root) {
  throw new Error("missing #app mount point");
}
// same-origin API: the bundle is served by the repository under /ui/
const app = new App(root, new ApiClient(""));
void app.start();
