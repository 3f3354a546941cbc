import { ApiClient } from "./api.js";
import { ConsoleApp } from "./app.js";

const root = document.getElementById("app");
if (root) new ConsoleApp(root, new ApiClient(""));
