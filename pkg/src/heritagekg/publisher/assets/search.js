// Client-side filter over the generated search index.
(function () {
  "use strict";
  var input = document.getElementById("search");
  var list = document.getElementById("entities");
  if (!input || !list) { return; }
  var items = Array.prototype.slice.call(list.querySelectorAll("li[data-slug]"));
  var bySlug = {};
  items.forEach(function (li) {
    bySlug[li.getAttribute("data-slug")] = li.textContent.toLowerCase();
  });

  function apply() {
    var q = input.value.trim().toLowerCase();
    items.forEach(function (li) {
      var text = bySlug[li.getAttribute("data-slug")] || "";
      li.hidden = q !== "" && text.indexOf(q) === -1;
    });
  }

  // The JSON index adds IRIs and class names to the searchable text. Under
  // file:// the fetch may be refused; the list text is enough then.
  if (window.fetch) {
    fetch("search-index.json")
      .then(function (r) { return r.ok ? r.json() : []; })
      .then(function (entries) {
        entries.forEach(function (e) {
          bySlug[e.slug] = [e.label, e.iri, e.classes.join(" ")].join(" ").toLowerCase();
        });
        apply();
      })
      .catch(function () {});
  }
  input.addEventListener("input", apply);
}());
