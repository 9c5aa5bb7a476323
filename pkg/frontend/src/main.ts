import { WorkbenchApi } from "./api.js";
import { App } from "./app.js";

const root = document.getElementById("app");
if (root) {
  const app = new App(new WorkbenchApi(""), root);
  void app.init();
}
