import { ApiClient } from "./api.js";
import { Controller } from "./app.js";

const root = document.getElementById("app");
if (!root) throw new Error("missing #app container");

const controller = new Controller(new ApiClient(""), (html) => {
  root.innerHTML = html;
});

root.addEventListener("click", (event) => {
  const target = (event.target as HTMLElement).closest<HTMLElement>(
    "[data-action]",
  );
  if (!target || target.hasAttribute("disabled")) return;
  const action = target.dataset.action;
  if (action === "toggle" && target.dataset.word) {
    controller.toggle(target.dataset.word);
  } else if (action === "submit") {
    void controller.submit();
  } else if (action === "judge" && target.dataset.wine && target.dataset.verdict) {
    void controller.judge(
      Number(target.dataset.wine),
      target.dataset.verdict as "liked" | "disliked",
    );
  } else if (action === "retry" && target.dataset.retry) {
    void controller.retry(target.dataset.retry);
  }
});

void controller.start();
